#pragma once

#include <span>

namespace splitsec {

double mean(std::span<const double> xs);

// Returns 0 when either series is constant.
double pearson(std::span<const double> xs, std::span<const double> ys);

// Pearson over average ranks.
double spearman(std::span<const double> xs, std::span<const double> ys);

} // namespace splitsec
