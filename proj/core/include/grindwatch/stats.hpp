#pragma once

#include <span>
#include <vector>

namespace grindwatch {

/// 1-based ranks; tied values share the mean of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

/// Returns 0 when either input is constant.
double pearson(std::span<const double> a, std::span<const double> b);

double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace grindwatch
