#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "grindwatch/lda.hpp"
#include "grindwatch/pca.hpp"
#include "grindwatch/trace.hpp"

namespace grindwatch {

struct MonitorConfig {
  /// Warning limit position between the NoBurn mean (0) and the threshold (1).
  double warning_fraction = 0.8;
  /// Consecutive qualifying observations needed before the state advances.
  std::size_t hold_count = 1;
};

void validate(const MonitorConfig& config);

enum class ToolState { Healthy, Warning, Burn };

std::string_view tool_state_name(ToolState s) noexcept;

/// Deployable model: resampling length, PCA, discriminant and control limits.
struct ModelBundle {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  std::size_t resample_length = kDefaultResampleLength;
  PcaModel pca;
  LdaModel lda;
  MonitorConfig monitor;
  std::string training_fingerprint;

  double warning_limit() const;
};

/// Throws CorruptModel when component dimensions disagree, or InvalidConfig
/// when the control limits are not ordered mean_no_burn < warning < threshold.
void validate(const ModelBundle& bundle);

/// Full per-trace pipeline: resample, project, score and classify.
HealthVerdict evaluate(const ModelBundle& bundle, const PowerTrace& trace);
HealthVerdict evaluate_row(const ModelBundle& bundle, const Eigen::VectorXd& resampled,
                           std::string unit_id);

struct HistoryEntry {
  std::string unit_id;
  double ld1 = 0.0;
  HealthClass health = HealthClass::NoBurn;
  ToolState state_after = ToolState::Healthy;
};

/// Health state of one wheel. States only advance (Healthy, Warning, Burn),
/// one level per observation; a replaced wheel needs a fresh state.
struct MonitorState {
  ToolState state = ToolState::Healthy;
  double warning_limit = 0.0;
  /// Consecutive observations at or above the limit gating the next state.
  std::size_t consecutive_above = 0;
  std::vector<HistoryEntry> history;

  static MonitorState start(const ModelBundle& bundle);
};

struct MonitorEvent {
  std::string unit_id;
  double ld1 = 0.0;
  HealthClass health = HealthClass::NoBurn;
  ToolState prior_state = ToolState::Healthy;
  ToolState state = ToolState::Healthy;
  bool alert = false;
  /// Observation arrived after the tool had already reached Burn.
  bool post_failure = false;
};

struct Observation {
  MonitorEvent event;
  MonitorState state;
};

/// Pure transition on an LD1 reading that has already been classified.
Observation advance(const MonitorState& state, const MonitorConfig& config, double threshold,
                    const HealthVerdict& verdict);

Observation observe(const MonitorState& state, const ModelBundle& bundle, const PowerTrace& trace);

/// One JSON object per line: unit_id, ld1 (6 significant digits), class,
/// prior_state, state, alert, post_failure.
std::string format_event(const MonitorEvent& event);

}  // namespace grindwatch
