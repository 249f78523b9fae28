#include "grindwatch/pca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "grindwatch/error.hpp"

namespace grindwatch {

void apply_sign_convention(Eigen::MatrixXd& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
      const double a = std::abs(columns(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (columns.rows() > 0 && columns(best, j) < 0.0) columns.col(j) *= -1.0;
  }
}

namespace {

std::size_t resolve_components(const ComponentSelection& sel, const Eigen::VectorXd& ratios,
                               std::size_t max_rank, std::size_t cap) {
  if (const auto* count = std::get_if<ComponentCount>(&sel)) {
    if (count->value < 1 || count->value > max_rank) {
      throw Error(Errc::BadComponentCount, "component count " + std::to_string(count->value) +
                                               " outside [1, " + std::to_string(max_rank) + "]");
    }
    return count->value;
  }
  const double target = std::get<VarianceTarget>(sel).fraction;
  if (!(target > 0.0 && target <= 1.0)) {
    throw Error(Errc::BadComponentCount, "variance target must be in (0, 1]");
  }
  const std::size_t limit = cap > 0 ? std::min(cap, max_rank) : max_rank;
  double cumulative = 0.0;
  for (std::size_t k = 1; k <= limit; ++k) {
    cumulative += ratios[static_cast<Eigen::Index>(k - 1)];
    if (cumulative >= target - 1e-12) return k;
  }
  return limit;
}

}  // namespace

PcaModel fit_pca(const Eigen::MatrixXd& x, const PcaOptions& options) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto l = static_cast<std::size_t>(x.cols());
  if (n < 2) {
    throw Error(Errc::InsufficientObservations, "need at least 2 observations, got " + std::to_string(n));
  }
  if (l < 1) {
    throw Error(Errc::DimensionMismatch, "matrix has no columns");
  }
  if (!x.allFinite()) {
    throw Error(Errc::InvalidValue, "matrix contains non-finite values");
  }

  PcaModel model;
  model.n_train = n;
  model.mean = x.colwise().mean().transpose();
  Eigen::MatrixXd centered = x.rowwise() - model.mean.transpose();
  if (options.scale_columns) {
    model.scale.resize(static_cast<Eigen::Index>(l));
    for (Eigen::Index j = 0; j < centered.cols(); ++j) {
      const double sd = std::sqrt(centered.col(j).squaredNorm() / static_cast<double>(n - 1));
      model.scale[j] = sd > 0.0 ? sd : 1.0;
      centered.col(j) /= model.scale[j];
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double total = sv.squaredNorm();
  if (!(total > 0.0)) {
    throw Error(Errc::ZeroVariance, "all observations are identical");
  }

  const std::size_t max_rank = std::min(n - 1, l);
  Eigen::VectorXd ratios = sv.array().square() / total;
  const std::size_t k = resolve_components(options.components, ratios, max_rank, options.max_components);

  const auto kk = static_cast<Eigen::Index>(k);
  model.loadings = svd.matrixV().leftCols(kk);
  apply_sign_convention(model.loadings);
  model.singular_values = sv.head(kk);
  model.explained_variance_ratio = ratios.head(kk);
  return model;
}

PcaModel fit_pca(const TraceMatrix& x, const PcaOptions& options) { return fit_pca(x.values, options); }

namespace {

void check_length(const PcaModel& model, Eigen::Index got) {
  if (static_cast<std::size_t>(got) != model.dimension()) {
    throw Error(Errc::DimensionMismatch, "expected length " + std::to_string(model.dimension()) +
                                             ", got " + std::to_string(got));
  }
}

}  // namespace

Eigen::VectorXd project(const PcaModel& model, const Eigen::VectorXd& x) {
  check_length(model, x.size());
  Eigen::VectorXd centered = x - model.mean;
  if (model.scale.size() > 0) centered.array() /= model.scale.array();
  return model.loadings.transpose() * centered;
}

Eigen::MatrixXd project_rows(const PcaModel& model, const Eigen::MatrixXd& x) {
  check_length(model, x.cols());
  Eigen::MatrixXd centered = x.rowwise() - model.mean.transpose();
  if (model.scale.size() > 0) {
    centered.array().rowwise() /= model.scale.transpose().array();
  }
  return centered * model.loadings;
}

Eigen::VectorXd reconstruct(const PcaModel& model, const Eigen::VectorXd& scores) {
  if (static_cast<std::size_t>(scores.size()) != model.components()) {
    throw Error(Errc::DimensionMismatch, "expected " + std::to_string(model.components()) +
                                             " scores, got " + std::to_string(scores.size()));
  }
  Eigen::VectorXd out = model.loadings * scores;
  if (model.scale.size() > 0) out.array() *= model.scale.array();
  return out + model.mean;
}

std::vector<ExplainedVarianceRow> explained_variance_report(const PcaModel& model) {
  std::vector<ExplainedVarianceRow> rows;
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < model.explained_variance_ratio.size(); ++i) {
    cumulative += model.explained_variance_ratio[i];
    rows.push_back({static_cast<std::size_t>(i + 1), model.explained_variance_ratio[i], cumulative});
  }
  return rows;
}

}  // namespace grindwatch
