#pragma once

// Small-sample benchmark: the median, over many simulated awards, of the mean
// FWCI of n papers drawn from a unit-mean lognormal baseline.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fwci/corpus.hpp"
#include "fwci/lognormal.hpp"
#include "fwci/streams.hpp"

namespace fwci {

// Lognormal with sigma^2 = -2 mu, i.e. mean exactly 1.
class BaselineField {
public:
    // Throws std::invalid_argument unless sigma_sq > 0 and finite.
    explicit BaselineField(double sigma_sq);

    double sigma_sq() const { return sigma_sq_; }
    LognormalParams params() const;

private:
    double sigma_sq_;
};

// Draws e^(mu + sigma Z), advancing `stream`.
std::vector<double> sample_lognormal(const LognormalParams& params, std::size_t n, Stream& stream);

struct MedianCurvePoint {
    int n = 0;
    double sigma_sq = 0;
    double median_mean = 0;
    int reps = 0;
    std::uint64_t seed = 0;
};

void to_json(nlohmann::ordered_json& j, const MedianCurvePoint& p);

// Replicate r uses make_stream(seed, r). Throws std::invalid_argument unless
// n >= 1 and reps >= 1.
MedianCurvePoint median_of_means(int n, const BaselineField& baseline, int reps, std::uint64_t seed);

// Seed for the (n, sigma^2) sub-stream. Keyed on the value of sigma^2 rather
// than its list position, so changing the baseline list leaves other curves
// untouched.
std::uint64_t curve_seed(std::uint64_t master_seed, int n, const BaselineField& baseline);

// One point per (n, baseline) pair, baselines outermost.
std::vector<MedianCurvePoint> median_curve(std::span<const int> n_values,
                                           std::span<const BaselineField> baselines,
                                           int reps, std::uint64_t seed);

enum class Verdict { above_median, below_median };

std::string_view to_string(Verdict v);

struct BaselineVerdict {
    double sigma_sq = 0;
    double threshold = 0;
    Verdict verdict = Verdict::below_median;
};

struct AwardBenchmark {
    std::string award_code;
    std::size_t n_papers = 0;
    double observed_mean = 0;
    std::vector<BaselineVerdict> verdicts;  // in baseline order
};

// above_median iff observed_mean >= threshold (ties count as above).
// Thresholds come from median_of_means(n, baseline, reps, curve_seed(seed, n, baseline)).
// Throws std::invalid_argument when the award has no papers or no mean.
AwardBenchmark benchmark_award(const AwardSummary& summary,
                               std::span<const BaselineField> baselines,
                               int reps, std::uint64_t seed);

// Same as calling benchmark_award per summary; each distinct n is simulated once.
std::vector<AwardBenchmark> benchmark_awards(std::span<const AwardSummary> summaries,
                                             std::span<const BaselineField> baselines,
                                             int reps, std::uint64_t seed);

struct BaselineTally {
    double sigma_sq = 0;
    std::size_t above = 0;
    std::size_t below = 0;
    // Awards with mean < 1 that still clear the simulated median.
    std::size_t further_above = 0;
    double above_fraction = 0;
};

struct BenchmarkAggregate {
    std::size_t n_awards = 0;
    std::size_t mean_at_least_one = 0;
    double mean_at_least_one_fraction = 0;
    std::vector<BaselineTally> per_baseline;
};

void to_json(nlohmann::ordered_json& j, const BenchmarkAggregate& a);

// Baselines are taken from the first benchmark; every benchmark must share them.
BenchmarkAggregate aggregate_benchmarks(std::span<const AwardBenchmark> benchmarks);

}  // namespace fwci
