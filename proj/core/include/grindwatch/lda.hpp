#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "grindwatch/trace.hpp"

namespace grindwatch {

struct ClassPriors {
  double no_burn = 0.5;
  double burn = 0.5;
};

struct LdaOptions {
  /// Defaults to the training class proportions.
  std::optional<ClassPriors> priors;
  /// Relative ridge: Sw + ridge * (trace(Sw) / k) * I.
  double ridge = 1e-8;
};

/// Two-class Fisher discriminant in PCA-score space. The direction is unit
/// length and oriented so that the Burn class mean lies above the NoBurn
/// class mean on LD1.
struct LdaModel {
  Eigen::VectorXd direction;
  double mean_no_burn = 0.0;
  double mean_burn = 0.0;
  double threshold = 0.0;
  ClassPriors priors;
  double ridge = 0.0;

  std::size_t dimension() const { return static_cast<std::size_t>(direction.size()); }
};

struct HealthVerdict {
  std::string unit_id;
  double ld1 = 0.0;
  HealthClass health = HealthClass::NoBurn;
  /// ld1 - threshold; non-negative exactly when the verdict is Burn.
  double margin = 0.0;
};

LdaModel fit_lda(const Eigen::MatrixXd& scores, const std::vector<HealthClass>& labels,
                 const LdaOptions& options = {});

double ld1_score(const LdaModel& model, const Eigen::VectorXd& scores);

/// Ties (ld1 == threshold) are Burn.
HealthVerdict classify(const LdaModel& model, const Eigen::VectorXd& scores, std::string unit_id = {});

/// Squared separation of the projected class means over the pooled
/// within-class variance (denominator n - 2) of projections onto `w`.
double fisher_ratio(const Eigen::MatrixXd& scores, const std::vector<HealthClass>& labels,
                    const Eigen::VectorXd& w);

}  // namespace grindwatch
