#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "grindwatch/lda.hpp"
#include "grindwatch/monitor.hpp"
#include "grindwatch/pca.hpp"
#include "grindwatch/trace.hpp"

namespace grindwatch {

struct FitOptions {
  std::size_t resample_length = kDefaultResampleLength;
  PcaOptions pca;
  LdaOptions lda;
  MonitorConfig monitor;
};

struct FitSummary {
  std::size_t n = 0;
  std::size_t resample_length = 0;
  std::size_t components = 0;
  std::vector<ExplainedVarianceRow> explained;
  std::size_t n_no_burn = 0;
  std::size_t n_burn = 0;
  double threshold = 0.0;
  double warning_limit = 0.0;
};

struct FitResult {
  ModelBundle bundle;
  FitSummary summary;
};

/// Labels of every row; throws UnlabeledRow naming the first unlabeled unit.
std::vector<HealthClass> require_labels(const TraceMatrix& matrix);

/// Content digest of the training rows (metadata and resampled values).
std::string training_fingerprint(const TraceMatrix& matrix);

/// PCA then Fisher LDA on the PCA scores. With a variance target the
/// component count is capped at n - 2, the rank limit of the pooled
/// within-class scatter.
FitResult fit_model(const TraceMatrix& matrix, const FitOptions& options = {});

struct Prediction {
  TraceMeta meta;
  double ld1 = 0.0;
  HealthClass predicted = HealthClass::NoBurn;
  std::optional<HealthClass> actual;
};

std::vector<Prediction> predict(const ModelBundle& bundle, const TraceMatrix& matrix);

/// counts[predicted][actual], NoBurn first.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 2>, 2> counts{};

  std::size_t at(HealthClass predicted, HealthClass actual) const;
  std::size_t misclassified() const { return counts[0][1] + counts[1][0]; }
  std::size_t total() const;
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Only labelled predictions are counted; nullopt when there are none.
std::optional<ConfusionMatrix> confusion_matrix(const std::vector<Prediction>& predictions);

std::string format_predictions_csv(const std::vector<Prediction>& predictions);
std::string format_confusion(const ConfusionMatrix& cm);

struct ScoreReport {
  std::vector<TraceMeta> meta;
  Eigen::MatrixXd pc_scores;  // n x k
  std::vector<double> ld1;
  std::vector<HealthClass> predicted;
  double threshold = 0.0;
  double warning_limit = 0.0;
  /// |Spearman| of each PC score column and of LD1 against observation index.
  std::vector<double> pc_index_correlation;
  double ld1_index_correlation = 0.0;
  /// 0-based index of the PC with the largest |rank correlation| with index.
  std::size_t wear_axis = 0;
};

ScoreReport build_report(const ModelBundle& bundle, const TraceMatrix& matrix);

/// observation,unit_id,wheel_id,parts_ground,burn_rank,pc1..pck,ld1,predicted,
/// threshold,warning_limit,wear_axis
std::string format_report_csv(const ScoreReport& report);

struct MonitorRun {
  std::vector<MonitorEvent> events;
  MonitorState final_state;
};

MonitorRun run_monitor(const ModelBundle& bundle, const std::vector<PowerTrace>& traces);

}  // namespace grindwatch
