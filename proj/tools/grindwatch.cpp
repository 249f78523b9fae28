// grindwatch: simulate grinding campaigns, fit PCA + LDA tool-health models,
// and classify or monitor power traces.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "grindwatch/error.hpp"
#include "grindwatch/model_io.hpp"
#include "grindwatch/pipeline.hpp"
#include "grindwatch/simgrind.hpp"

namespace gw = grindwatch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitWarning = 3;
constexpr int kExitBurn = 4;

struct Options {
  std::string manifest;
  std::string model;
  std::string out;
  std::size_t resample_length = gw::kDefaultResampleLength;
  std::optional<std::size_t> components;
  double variance_target = 0.95;
  std::string priors = "proportional";
  double ridge = 1e-8;
  double warning_fraction = 0.8;
  std::size_t hold_count = 1;
  std::optional<std::uint64_t> seed;
  std::string preset = "default";
  std::uint64_t lifetime_step = 0;
  bool scale_columns = false;
  std::vector<std::string> traces;
};

std::optional<gw::ClassPriors> parse_priors(const std::string& text) {
  if (text == "proportional") return std::nullopt;
  if (text == "equal") return gw::ClassPriors{0.5, 0.5};
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(text);
    const double no_burn = std::stod(text.substr(0, comma));
    const double burn = std::stod(text.substr(comma + 1));
    const double sum = no_burn + burn;
    if (!(no_burn > 0.0 && burn > 0.0)) throw std::invalid_argument(text);
    return gw::ClassPriors{no_burn / sum, burn / sum};
  } catch (const std::exception&) {
    throw gw::Error(gw::Errc::InvalidConfig,
                    "--priors expects 'proportional', 'equal' or 'p_noburn,p_burn', got '" + text + "'");
  }
}

/// Writes to --out when given, stdout otherwise.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
  if (!f) throw gw::Error(gw::Errc::IoError, "cannot open output", std::nullopt, o.out);
  f << text;
}

gw::TraceMatrix load_matrix(const std::string& manifest_path, std::size_t length) {
  if (manifest_path.empty()) throw gw::Error(gw::Errc::InvalidConfig, "--manifest is required");
  return gw::build_matrix(gw::read_manifest_file(manifest_path), length);
}

gw::ModelBundle load_bundle(const Options& o) {
  if (o.model.empty()) throw gw::Error(gw::Errc::InvalidConfig, "--model is required");
  return gw::load_model_file(o.model);
}

int cmd_simulate(const Options& o) {
  if (o.out.empty()) throw gw::Error(gw::Errc::InvalidConfig, "--out directory is required");
  gw::ScenarioPreset preset = gw::load_preset(o.preset, o.seed);
  if (o.lifetime_step > 0) {
    for (auto& w : preset.wheels) w = gw::lifetime_scenario(w, o.lifetime_step);
    preset.name += "-lifetime";
  }
  std::filesystem::create_directories(o.out);
  const auto manifest = gw::generate_campaign(preset, o.out);
  std::cout << "preset " << preset.name << ": " << manifest.entries.size() << " traces written to "
            << o.out << "\n";
  return kExitOk;
}

int cmd_fit(const Options& o) {
  gw::FitOptions fit;
  fit.resample_length = o.resample_length;
  if (o.components) {
    fit.pca.components = gw::ComponentCount{*o.components};
  } else {
    fit.pca.components = gw::VarianceTarget{o.variance_target};
  }
  fit.pca.scale_columns = o.scale_columns;
  fit.lda.priors = parse_priors(o.priors);
  fit.lda.ridge = o.ridge;
  fit.monitor = {o.warning_fraction, o.hold_count};
  gw::validate(fit.monitor);
  if (o.model.empty()) throw gw::Error(gw::Errc::InvalidConfig, "--model output path is required");

  const auto matrix = load_matrix(o.manifest, o.resample_length);
  const auto result = gw::fit_model(matrix, fit);
  gw::save_model_file(result.bundle, o.model);

  const auto& s = result.summary;
  std::cout << "observations: " << s.n << "\n"
            << "resample_length: " << s.resample_length << "\n"
            << "components: " << s.components << "\n";
  for (const auto& row : s.explained) {
    std::cout << "  pc" << row.component << ": ratio " << row.ratio << ", cumulative " << row.cumulative << "\n";
  }
  std::cout << "class counts: NoBurn " << s.n_no_burn << ", Burn " << s.n_burn << "\n"
            << "threshold: " << s.threshold << "\n"
            << "warning_limit: " << s.warning_limit << "\n"
            << "model written to " << o.model << "\n";
  return kExitOk;
}

int cmd_predict(const Options& o) {
  const auto bundle = load_bundle(o);
  const auto matrix = load_matrix(o.manifest, bundle.resample_length);
  const auto predictions = gw::predict(bundle, matrix);
  emit(o, gw::format_predictions_csv(predictions));
  if (auto cm = gw::confusion_matrix(predictions)) {
    std::ostream& os = o.out.empty() ? std::cerr : std::cout;
    os << gw::format_confusion(*cm);
  }
  return kExitOk;
}

std::vector<gw::PowerTrace> monitor_inputs(const Options& o) {
  std::vector<gw::PowerTrace> traces;
  if (!o.manifest.empty()) {
    const auto manifest = gw::read_manifest_file(o.manifest);
    for (const auto& e : manifest.entries) {
      auto t = gw::read_trace_file(manifest.resolve(e));
      t.meta = e.meta;
      traces.push_back(std::move(t));
    }
    return traces;
  }
  std::vector<std::string> paths = o.traces;
  if (paths.empty()) {
    std::string line;
    while (std::getline(std::cin, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) paths.push_back(line);
    }
  }
  for (const auto& p : paths) {
    auto t = gw::read_trace_file(p);
    t.meta.unit_id = std::filesystem::path(p).stem().string();
    traces.push_back(std::move(t));
  }
  return traces;
}

int cmd_monitor(const Options& o) {
  const auto bundle = load_bundle(o);
  const auto run = gw::run_monitor(bundle, monitor_inputs(o));
  std::string text;
  for (const auto& e : run.events) text += gw::format_event(e) + "\n";
  emit(o, text);
  switch (run.final_state.state) {
    case gw::ToolState::Healthy: return kExitOk;
    case gw::ToolState::Warning: return kExitWarning;
    case gw::ToolState::Burn: return kExitBurn;
  }
  return kExitOk;
}

int cmd_report(const Options& o) {
  const auto bundle = load_bundle(o);
  const auto matrix = load_matrix(o.manifest, bundle.resample_length);
  emit(o, gw::format_report_csv(gw::build_report(bundle, matrix)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grinding-wheel health monitoring from power traces"};
  app.require_subcommand(1);
  Options o;

  auto* simulate = app.add_subcommand("simulate", "Write a synthetic campaign (traces + manifests)");
  simulate->add_option("--preset", o.preset, "'default', 'table2-counts' or a scenario JSON file");
  simulate->add_option("--seed", o.seed, "Override every wheel's seed");
  simulate->add_option("--out", o.out, "Output directory")->required();
  simulate->add_option("--lifetime-step", o.lifetime_step,
                       "Replace checkpoints with one unit every N parts up to 1.3x burn onset");

  auto* fit = app.add_subcommand("fit", "Fit a PCA + LDA model on a labelled manifest");
  fit->add_option("--manifest", o.manifest, "Training manifest CSV")->required();
  fit->add_option("--model", o.model, "Model file to write")->required();
  fit->add_option("--resample-length", o.resample_length, "Samples per resampled trace");
  auto* components = fit->add_option("--components", o.components, "Fixed number of principal components");
  fit->add_option("--variance-target", o.variance_target, "Cumulative explained variance to reach")
      ->excludes(components);
  fit->add_option("--priors", o.priors, "'proportional', 'equal' or 'p_noburn,p_burn'");
  fit->add_option("--ridge", o.ridge, "Relative ridge on the within-class scatter");
  fit->add_option("--warning-fraction", o.warning_fraction, "Warning limit between NoBurn mean and threshold");
  fit->add_option("--hold-count", o.hold_count, "Consecutive crossings before a state change");
  fit->add_flag("--scale-columns", o.scale_columns, "Scale variables to unit variance before PCA");

  auto* predict = app.add_subcommand("predict", "Classify every trace of a manifest");
  predict->add_option("--model", o.model)->required();
  predict->add_option("--manifest", o.manifest)->required();
  predict->add_option("--out", o.out, "Predictions CSV (stdout if omitted)");

  auto* monitor = app.add_subcommand("monitor", "Stream traces through the health state machine");
  monitor->add_option("--model", o.model)->required();
  monitor->add_option("--manifest", o.manifest, "Read traces in manifest order");
  monitor->add_option("--out", o.out, "Event stream file (stdout if omitted)");
  monitor->add_option("traces", o.traces, "Trace CSV files; read from stdin when none are given");

  auto* report = app.add_subcommand("report", "Per-observation PC and LD1 scores for plotting");
  report->add_option("--model", o.model)->required();
  report->add_option("--manifest", o.manifest)->required();
  report->add_option("--out", o.out, "Report CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o);
    if (fit->parsed()) return cmd_fit(o);
    if (predict->parsed()) return cmd_predict(o);
    if (monitor->parsed()) return cmd_monitor(o);
    if (report->parsed()) return cmd_report(o);
  } catch (const gw::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
