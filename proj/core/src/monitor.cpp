#include "grindwatch/monitor.hpp"

#include <cmath>

#include "json.hpp"

#include "grindwatch/error.hpp"
#include "text_util.hpp"

namespace grindwatch {

std::string_view tool_state_name(ToolState s) noexcept {
  switch (s) {
    case ToolState::Healthy: return "Healthy";
    case ToolState::Warning: return "Warning";
    case ToolState::Burn: return "Burn";
  }
  return "Unknown";
}

void validate(const MonitorConfig& config) {
  if (!(config.warning_fraction > 0.0 && config.warning_fraction < 1.0)) {
    throw Error(Errc::InvalidConfig, "warning_fraction must be in (0, 1)");
  }
  if (config.hold_count < 1) {
    throw Error(Errc::InvalidConfig, "hold_count must be >= 1");
  }
}

double ModelBundle::warning_limit() const {
  return lda.mean_no_burn + monitor.warning_fraction * (lda.threshold - lda.mean_no_burn);
}

void validate(const ModelBundle& b) {
  const auto fail = [](const std::string& what) { throw Error(Errc::CorruptModel, what); };
  if (b.resample_length < 2) fail("resample_length must be >= 2");
  if (b.pca.dimension() != b.resample_length) fail("mean length differs from resample_length");
  if (static_cast<std::size_t>(b.pca.loadings.rows()) != b.resample_length) {
    fail("loadings row count differs from resample_length");
  }
  const auto k = b.pca.components();
  if (k < 1) fail("model has no principal components");
  if (b.pca.scale.size() != 0 && static_cast<std::size_t>(b.pca.scale.size()) != b.resample_length) {
    fail("scale length differs from resample_length");
  }
  if (static_cast<std::size_t>(b.pca.singular_values.size()) != k ||
      static_cast<std::size_t>(b.pca.explained_variance_ratio.size()) != k) {
    fail("singular value count differs from component count");
  }
  if (b.lda.dimension() != k) fail("discriminant dimension differs from component count");
  if (std::abs(b.lda.direction.norm() - 1.0) > 1e-9) fail("discriminant direction is not unit length");
  if (!(b.lda.mean_burn > b.lda.mean_no_burn)) fail("class means are not oriented");
  validate(b.monitor);
  if (!(b.lda.threshold > b.lda.mean_no_burn)) {
    throw Error(Errc::InvalidConfig, "threshold lies at or below the NoBurn mean; no room for a warning limit");
  }
}

HealthVerdict evaluate_row(const ModelBundle& bundle, const Eigen::VectorXd& resampled,
                           std::string unit_id) {
  return classify(bundle.lda, project(bundle.pca, resampled), std::move(unit_id));
}

HealthVerdict evaluate(const ModelBundle& bundle, const PowerTrace& trace) {
  return evaluate_row(bundle, resample(trace, bundle.resample_length), trace.meta.unit_id);
}

MonitorState MonitorState::start(const ModelBundle& bundle) {
  MonitorState s;
  s.warning_limit = bundle.warning_limit();
  return s;
}

Observation advance(const MonitorState& state, const MonitorConfig& config, double threshold,
                    const HealthVerdict& verdict) {
  Observation out{{}, state};
  MonitorState& next = out.state;
  MonitorEvent& ev = out.event;
  ev.unit_id = verdict.unit_id;
  ev.ld1 = verdict.ld1;
  ev.health = verdict.health;
  ev.prior_state = state.state;
  ev.post_failure = state.state == ToolState::Burn;

  if (state.state != ToolState::Burn) {
    const double gate = state.state == ToolState::Healthy ? state.warning_limit : threshold;
    next.consecutive_above = verdict.ld1 >= gate ? state.consecutive_above + 1 : 0;
    if (next.consecutive_above >= config.hold_count) {
      next.state = state.state == ToolState::Healthy ? ToolState::Warning : ToolState::Burn;
      next.consecutive_above = 0;
    }
  }
  ev.state = next.state;
  ev.alert = ev.state != ev.prior_state;
  next.history.push_back({verdict.unit_id, verdict.ld1, verdict.health, next.state});
  return out;
}

Observation observe(const MonitorState& state, const ModelBundle& bundle, const PowerTrace& trace) {
  return advance(state, bundle.monitor, bundle.lda.threshold, evaluate(bundle, trace));
}

std::string format_event(const MonitorEvent& e) {
  std::string out = "{\"unit_id\":";
  out += nlohmann::json(e.unit_id).dump();
  out += ",\"ld1\":";
  out += detail::format_significant(e.ld1, 6);
  out += ",\"class\":\"";
  out += health_class_name(e.health);
  out += "\",\"prior_state\":\"";
  out += tool_state_name(e.prior_state);
  out += "\",\"state\":\"";
  out += tool_state_name(e.state);
  out += "\",\"alert\":";
  out += e.alert ? "true" : "false";
  out += ",\"post_failure\":";
  out += e.post_failure ? "true" : "false";
  out += '}';
  return out;
}

}  // namespace grindwatch
