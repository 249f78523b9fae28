#include "grindwatch/lda.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "grindwatch/error.hpp"

namespace grindwatch {

namespace {

struct ClassStats {
  Eigen::VectorXd mean_no_burn;
  Eigen::VectorXd mean_burn;
  Eigen::MatrixXd within;  // pooled covariance, denominator n - 2
  std::size_t n_no_burn = 0;
  std::size_t n_burn = 0;
};

ClassStats class_stats(const Eigen::MatrixXd& scores, const std::vector<HealthClass>& labels) {
  if (static_cast<std::size_t>(scores.rows()) != labels.size()) {
    throw Error(Errc::DimensionMismatch, std::to_string(scores.rows()) + " score rows but " +
                                             std::to_string(labels.size()) + " labels");
  }
  const Eigen::Index k = scores.cols();
  ClassStats st;
  st.mean_no_burn = Eigen::VectorXd::Zero(k);
  st.mean_burn = Eigen::VectorXd::Zero(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto row = scores.row(static_cast<Eigen::Index>(i)).transpose();
    if (labels[i] == HealthClass::Burn) {
      st.mean_burn += row;
      ++st.n_burn;
    } else {
      st.mean_no_burn += row;
      ++st.n_no_burn;
    }
  }
  if (st.n_burn < 2 || st.n_no_burn < 2) {
    throw Error(Errc::DegenerateClasses,
                "each class needs at least 2 observations (NoBurn=" + std::to_string(st.n_no_burn) +
                    ", Burn=" + std::to_string(st.n_burn) + ")");
  }
  st.mean_burn /= static_cast<double>(st.n_burn);
  st.mean_no_burn /= static_cast<double>(st.n_no_burn);

  st.within = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Eigen::VectorXd d = scores.row(static_cast<Eigen::Index>(i)).transpose() -
                              (labels[i] == HealthClass::Burn ? st.mean_burn : st.mean_no_burn);
    st.within.noalias() += d * d.transpose();
  }
  st.within /= static_cast<double>(labels.size() - 2);
  return st;
}

void check_priors(const ClassPriors& p) {
  if (!(p.no_burn > 0.0 && p.no_burn < 1.0 && p.burn > 0.0 && p.burn < 1.0) ||
      std::abs(p.no_burn + p.burn - 1.0) > 1e-12) {
    throw Error(Errc::InvalidConfig, "priors must lie in (0,1) and sum to 1");
  }
}

}  // namespace

LdaModel fit_lda(const Eigen::MatrixXd& scores, const std::vector<HealthClass>& labels,
                 const LdaOptions& options) {
  if (scores.cols() < 1) throw Error(Errc::DimensionMismatch, "score matrix has no columns");
  if (!(options.ridge >= 0.0) || !std::isfinite(options.ridge)) {
    throw Error(Errc::InvalidConfig, "ridge must be a finite non-negative number");
  }
  const ClassStats st = class_stats(scores, labels);
  const Eigen::Index k = scores.cols();

  const double tr = st.within.trace();
  if (!(tr > 0.0)) {
    throw Error(Errc::SingularWithinScatter, "within-class scatter is zero");
  }
  Eigen::MatrixXd regularized = st.within;
  regularized.diagonal().array() += options.ridge * tr / static_cast<double>(k);

  Eigen::LDLT<Eigen::MatrixXd> ldlt(regularized);
  constexpr double kMinRcond = 1e-14;
  const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(pivots.minCoeff() > kMinRcond * pivots.maxCoeff()) ||
      !(ldlt.rcond() >= kMinRcond)) {
    throw Error(Errc::SingularWithinScatter,
                "within-class scatter is numerically singular; raise the ridge or lower k");
  }

  const Eigen::VectorXd delta = st.mean_burn - st.mean_no_burn;
  Eigen::VectorXd w = ldlt.solve(delta);
  const double norm = w.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(Errc::DegenerateClasses, "class means coincide");
  }
  w /= norm;

  LdaModel model;
  model.ridge = options.ridge;
  model.mean_no_burn = w.dot(st.mean_no_burn);
  model.mean_burn = w.dot(st.mean_burn);
  if (model.mean_burn < model.mean_no_burn) {
    w = -w;
    model.mean_no_burn = -model.mean_no_burn;
    model.mean_burn = -model.mean_burn;
  }
  model.direction = std::move(w);
  const double gap = model.mean_burn - model.mean_no_burn;
  if (!(gap > 0.0)) {
    throw Error(Errc::DegenerateClasses, "class means do not separate on LD1");
  }

  if (options.priors) {
    check_priors(*options.priors);
    model.priors = *options.priors;
  } else {
    const double n = static_cast<double>(labels.size());
    model.priors = {static_cast<double>(st.n_no_burn) / n, static_cast<double>(st.n_burn) / n};
  }

  // Pooled LD1 variance from the unregularized scatter.
  const double ld_var = model.direction.dot(st.within * model.direction);
  model.threshold = 0.5 * (model.mean_no_burn + model.mean_burn) +
                    std::log(model.priors.no_burn / model.priors.burn) * ld_var / gap;
  return model;
}

double ld1_score(const LdaModel& model, const Eigen::VectorXd& scores) {
  if (scores.size() != model.direction.size()) {
    throw Error(Errc::DimensionMismatch, "expected " + std::to_string(model.direction.size()) +
                                             " scores, got " + std::to_string(scores.size()));
  }
  return model.direction.dot(scores);
}

HealthVerdict classify(const LdaModel& model, const Eigen::VectorXd& scores, std::string unit_id) {
  HealthVerdict v;
  v.unit_id = std::move(unit_id);
  v.ld1 = ld1_score(model, scores);
  v.margin = v.ld1 - model.threshold;
  v.health = v.ld1 >= model.threshold ? HealthClass::Burn : HealthClass::NoBurn;
  return v;
}

double fisher_ratio(const Eigen::MatrixXd& scores, const std::vector<HealthClass>& labels,
                    const Eigen::VectorXd& w) {
  if (w.size() != scores.cols()) {
    throw Error(Errc::DimensionMismatch, "direction length does not match score columns");
  }
  if (!(w.squaredNorm() > 0.0)) throw Error(Errc::ZeroDirection, "direction is zero");
  const ClassStats st = class_stats(scores, labels);
  const double between = w.dot(st.mean_burn - st.mean_no_burn);
  const double within = w.dot(st.within * w);
  if (!(within > 0.0)) return std::numeric_limits<double>::infinity();
  return between * between / within;
}

}  // namespace grindwatch
