#include "fwci/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fwci {

std::uint64_t Histogram::total() const {
    std::uint64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
}

std::size_t Histogram::non_empty_bins() const {
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(),
                                                  [](std::uint64_t c) { return c > 0; }));
}

namespace {

std::vector<double> bin_centers(double lo, double hi, std::size_t n_bins) {
    const double w = (hi - lo) / static_cast<double>(n_bins);
    std::vector<double> centers(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) {
        centers[i] = lo + (static_cast<double>(i) + 0.5) * w;
    }
    return centers;
}

}  // namespace

Histogram build_histogram(std::span<const double> values, double lo, double hi, int n_bins) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("histogram range requires finite lo < hi");
    }
    if (n_bins < 1) throw std::invalid_argument("histogram needs at least one bin");

    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(static_cast<std::size_t>(n_bins), 0);
    h.centers = bin_centers(lo, hi, h.counts.size());

    const double span = hi - lo;
    const double bins = static_cast<double>(n_bins);
    for (double v : values) {
        if (!(v >= lo && v < hi)) {
            ++h.dropped;
            continue;
        }
        // The fractional position is computed before scaling by the bin count,
        // so doubling n_bins doubles the scaled position exactly and each fine
        // bin nests inside its coarse parent.
        const double pos = ((v - lo) / span) * bins;
        auto idx = static_cast<std::size_t>(pos);
        if (idx >= h.counts.size()) idx = h.counts.size() - 1;
        ++h.counts[idx];
    }
    return h;
}

std::vector<double> log_transform(std::span<const double> values, double zero_shift) {
    if (!(zero_shift > 0.0)) throw std::invalid_argument("zero_shift must be positive");
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        if (v < 0.0 || std::isnan(v)) throw std::invalid_argument("log_transform of a negative value");
        out.push_back(v == 0.0 ? std::log(zero_shift) : std::log(v));
    }
    return out;
}

void to_json(nlohmann::ordered_json& j, const Histogram& h) {
    j = nlohmann::ordered_json{
        {"lo", h.lo},
        {"hi", h.hi},
        {"n_bins", h.n_bins()},
        {"counts", h.counts},
        {"dropped", h.dropped},
    };
}

Histogram histogram_from_json(const nlohmann::ordered_json& j) {
    Histogram h;
    h.lo = j.at("lo").get<double>();
    h.hi = j.at("hi").get<double>();
    const auto n = j.at("n_bins").get<std::size_t>();
    h.counts = j.at("counts").get<std::vector<std::uint64_t>>();
    h.dropped = j.value("dropped", std::size_t{0});
    if (!(h.lo < h.hi) || n < 1 || h.counts.size() != n) {
        throw std::invalid_argument("inconsistent histogram record");
    }
    h.centers = bin_centers(h.lo, h.hi, n);
    return h;
}

}  // namespace fwci
