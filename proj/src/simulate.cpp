#include "fwci/simulate.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "fwci/stats.hpp"

namespace fwci {

BaselineField::BaselineField(double sigma_sq) : sigma_sq_(sigma_sq) {
    if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
        throw std::invalid_argument("baseline sigma^2 must be positive and finite");
    }
}

LognormalParams BaselineField::params() const {
    return LognormalParams(-0.5 * sigma_sq_, std::sqrt(sigma_sq_));
}

std::vector<double> sample_lognormal(const LognormalParams& params, std::size_t n, Stream& stream) {
    std::normal_distribution<double> z;
    std::vector<double> out(n);
    for (auto& x : out) x = std::exp(params.mu() + params.sigma() * z(stream));
    return out;
}

void to_json(nlohmann::ordered_json& j, const MedianCurvePoint& p) {
    j = nlohmann::ordered_json{
        {"n", p.n},
        {"sigma_sq", p.sigma_sq},
        {"median_mean", p.median_mean},
        {"reps", p.reps},
        {"seed", p.seed},
    };
}

MedianCurvePoint median_of_means(int n, const BaselineField& baseline, int reps, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulated award needs at least one paper");
    if (reps < 1) throw std::invalid_argument("median of means needs at least one replicate");

    const double mu = baseline.params().mu();
    const double sigma = baseline.params().sigma();
    std::vector<double> means(static_cast<std::size_t>(reps));
    parallel_for(means.size(), [&](std::size_t r) {
        Stream stream = make_stream(seed, r);
        std::normal_distribution<double> z;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += std::exp(mu + sigma * z(stream));
        means[r] = sum / n;
    });

    MedianCurvePoint point;
    point.n = n;
    point.sigma_sq = baseline.sigma_sq();
    point.median_mean = median_inplace(means);
    point.reps = reps;
    point.seed = seed;
    return point;
}

std::uint64_t curve_seed(std::uint64_t master_seed, int n, const BaselineField& baseline) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(n),
                       std::bit_cast<std::uint64_t>(baseline.sigma_sq()));
}

std::vector<MedianCurvePoint> median_curve(std::span<const int> n_values,
                                           std::span<const BaselineField> baselines,
                                           int reps, std::uint64_t seed) {
    if (n_values.empty()) throw std::invalid_argument("median curve needs at least one n");
    std::vector<MedianCurvePoint> points;
    points.reserve(n_values.size() * baselines.size());
    for (const auto& baseline : baselines) {
        for (int n : n_values) {
            points.push_back(median_of_means(n, baseline, reps, curve_seed(seed, n, baseline)));
        }
    }
    return points;
}

std::string_view to_string(Verdict v) {
    return v == Verdict::above_median ? "above_median" : "below_median";
}

namespace {

void check_award(const AwardSummary& summary) {
    if (summary.n_papers < 1 || !summary.mean_fwci) {
        throw std::invalid_argument("award " + summary.award_code + " has no papers with FWCI");
    }
}

AwardBenchmark judge(const AwardSummary& summary, std::span<const BaselineField> baselines,
                     std::span<const double> thresholds) {
    AwardBenchmark b;
    b.award_code = summary.award_code;
    b.n_papers = summary.n_papers;
    b.observed_mean = *summary.mean_fwci;
    for (std::size_t k = 0; k < baselines.size(); ++k) {
        const double threshold = thresholds[k];
        b.verdicts.push_back({baselines[k].sigma_sq(), threshold,
                              b.observed_mean >= threshold ? Verdict::above_median
                                                           : Verdict::below_median});
    }
    return b;
}

std::vector<double> thresholds_for(int n, std::span<const BaselineField> baselines, int reps,
                                   std::uint64_t seed) {
    std::vector<double> out;
    out.reserve(baselines.size());
    for (const auto& baseline : baselines) {
        out.push_back(median_of_means(n, baseline, reps, curve_seed(seed, n, baseline)).median_mean);
    }
    return out;
}

}  // namespace

AwardBenchmark benchmark_award(const AwardSummary& summary,
                               std::span<const BaselineField> baselines,
                               int reps, std::uint64_t seed) {
    check_award(summary);
    const int n = static_cast<int>(summary.n_papers);
    return judge(summary, baselines, thresholds_for(n, baselines, reps, seed));
}

std::vector<AwardBenchmark> benchmark_awards(std::span<const AwardSummary> summaries,
                                             std::span<const BaselineField> baselines,
                                             int reps, std::uint64_t seed) {
    std::map<int, std::vector<double>> cache;
    std::vector<AwardBenchmark> out;
    out.reserve(summaries.size());
    for (const auto& summary : summaries) {
        check_award(summary);
        const int n = static_cast<int>(summary.n_papers);
        auto it = cache.find(n);
        if (it == cache.end()) it = cache.emplace(n, thresholds_for(n, baselines, reps, seed)).first;
        out.push_back(judge(summary, baselines, it->second));
    }
    return out;
}

BenchmarkAggregate aggregate_benchmarks(std::span<const AwardBenchmark> benchmarks) {
    BenchmarkAggregate agg;
    agg.n_awards = benchmarks.size();
    if (benchmarks.empty()) return agg;

    for (const auto& v : benchmarks.front().verdicts) agg.per_baseline.push_back({v.sigma_sq, 0, 0, 0, 0.0});
    for (const auto& b : benchmarks) {
        if (b.verdicts.size() != agg.per_baseline.size()) {
            throw std::invalid_argument("benchmarks use different baseline sets");
        }
        const bool at_least_one = b.observed_mean >= 1.0;
        if (at_least_one) ++agg.mean_at_least_one;
        for (std::size_t k = 0; k < b.verdicts.size(); ++k) {
            auto& tally = agg.per_baseline[k];
            if (b.verdicts[k].sigma_sq != tally.sigma_sq) {
                throw std::invalid_argument("benchmarks use different baseline sets");
            }
            if (b.verdicts[k].verdict == Verdict::above_median) {
                ++tally.above;
                if (!at_least_one) ++tally.further_above;
            } else {
                ++tally.below;
            }
        }
    }
    const auto total = static_cast<double>(agg.n_awards);
    agg.mean_at_least_one_fraction = static_cast<double>(agg.mean_at_least_one) / total;
    for (auto& tally : agg.per_baseline) tally.above_fraction = static_cast<double>(tally.above) / total;
    return agg;
}

void to_json(nlohmann::ordered_json& j, const BenchmarkAggregate& a) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& t : a.per_baseline) {
        rows.push_back({
            {"sigma_sq", t.sigma_sq},
            {"above_median", t.above},
            {"below_median", t.below},
            {"above_fraction", t.above_fraction},
            {"below_one_but_above_median", t.further_above},
            // awards with mean >= 1 pass outright; the rest are judged by the median
            {"mean_at_least_one_plus_further", a.mean_at_least_one + t.further_above},
        });
    }
    j = nlohmann::ordered_json{
        {"n_awards", a.n_awards},
        {"mean_at_least_one", a.mean_at_least_one},
        {"mean_at_least_one_fraction", a.mean_at_least_one_fraction},
        {"per_sigma_sq", std::move(rows)},
    };
}

}  // namespace fwci
