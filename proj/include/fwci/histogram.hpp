#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace fwci {

// Fixed-width histogram over the half-open range [lo, hi). Every bin,
// including the last, is half-open.
struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::uint64_t> counts;
    std::vector<double> centers;
    std::size_t dropped = 0;  // inputs outside [lo, hi) or NaN

    std::size_t n_bins() const { return counts.size(); }
    double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
    std::uint64_t total() const;
    std::size_t non_empty_bins() const;
};

// Throws std::invalid_argument when lo >= hi or n_bins < 1.
Histogram build_histogram(std::span<const double> values, double lo, double hi, int n_bins);

// ln(v) for v > 0 and ln(zero_shift) for v == 0. Throws std::invalid_argument
// on negative input or a non-positive shift.
std::vector<double> log_transform(std::span<const double> values, double zero_shift);

// Serialized as {lo, hi, n_bins, counts, dropped}; centers are recomputed on load.
void to_json(nlohmann::ordered_json& j, const Histogram& h);
Histogram histogram_from_json(const nlohmann::ordered_json& j);

}  // namespace fwci
