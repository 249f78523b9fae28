#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "grindwatch/trace.hpp"

namespace grindwatch {

struct ComponentCount {
  std::size_t value = 1;
};

/// Smallest component count whose cumulative explained variance reaches the
/// fraction, in (0, 1].
struct VarianceTarget {
  double fraction = 0.95;
};

using ComponentSelection = std::variant<ComponentCount, VarianceTarget>;

struct PcaOptions {
  ComponentSelection components = VarianceTarget{0.95};
  /// Divide each centred column by its sample standard deviation.
  bool scale_columns = false;
  /// Upper bound applied when resolving a VarianceTarget (0 = none).
  std::size_t max_components = 0;
};

/// Principal components of a trace matrix.
///
/// Loadings are stored column-wise (L x k) and are orthonormal. Within each
/// column the entry of largest magnitude is positive, with ties going to the
/// lowest index, so that component orientation is reproducible.
struct PcaModel {
  Eigen::VectorXd mean;
  /// Empty unless column scaling was requested.
  Eigen::VectorXd scale;
  Eigen::MatrixXd loadings;
  Eigen::VectorXd singular_values;
  Eigen::VectorXd explained_variance_ratio;
  std::size_t n_train = 0;

  std::size_t dimension() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t components() const { return static_cast<std::size_t>(loadings.cols()); }
};

PcaModel fit_pca(const Eigen::MatrixXd& x, const PcaOptions& options = {});
PcaModel fit_pca(const TraceMatrix& x, const PcaOptions& options = {});

/// loadings^T (x - mean), after scaling when the model is scaled.
Eigen::VectorXd project(const PcaModel& model, const Eigen::VectorXd& x);

/// Scores of every row of `x` (n x k).
Eigen::MatrixXd project_rows(const PcaModel& model, const Eigen::MatrixXd& x);

Eigen::VectorXd reconstruct(const PcaModel& model, const Eigen::VectorXd& scores);

struct ExplainedVarianceRow {
  std::size_t component = 0;  // 1-based
  double ratio = 0.0;
  double cumulative = 0.0;
};

std::vector<ExplainedVarianceRow> explained_variance_report(const PcaModel& model);

/// Flips columns so that each one's largest-magnitude entry is positive.
void apply_sign_convention(Eigen::MatrixXd& columns);

}  // namespace grindwatch
