#pragma once

#include <span>

namespace fwci {

// Percentile of an ascending-sorted sample, linear interpolation between
// order statistics (position (N-1)p). p in [0, 1].
double linear_percentile(std::span<const double> sorted, double p);

// Median; an even count averages the two central order statistics.
// Reorders the input.
double median_inplace(std::span<double> values);

double arithmetic_mean(std::span<const double> values);

}  // namespace fwci
