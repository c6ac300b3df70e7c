#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "fwci/lognormal.hpp"
#include "fwci/stats.hpp"
#include "fwci/streams.hpp"

namespace fwci {

namespace {

struct MemberResult {
    double mu;
    double sigma;
};

LognormalParams log_moments(std::span<const double> values) {
    double sum = 0;
    for (double v : values) sum += std::log(v);
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0;
    for (double v : values) {
        const double d = std::log(v) - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(values.size()));
    return LognormalParams(mean, sd > 0.0 ? sd : 0.5);
}

Percentiles summarize(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return {linear_percentile(xs, 0.025), linear_percentile(xs, 0.5), linear_percentile(xs, 0.975)};
}

}  // namespace

FitEnsemble ensemble_fit(std::span<const double> values, const EnsembleConfig& config) {
    if (values.empty()) throw std::invalid_argument("ensemble fit of an empty sample");
    if (!(config.lo < config.hi)) throw std::invalid_argument("ensemble range requires lo < hi");
    if (config.bins_lo < 1 || config.bins_lo > config.bins_hi) {
        throw std::invalid_argument("ensemble bin range requires 1 <= bins_lo <= bins_hi");
    }
    if (config.n_fits < 1) throw std::invalid_argument("ensemble needs at least one fit");
    for (double v : values) {
        if (!(v > 0.0)) throw std::invalid_argument("ensemble values must be positive");
    }

    const LognormalParams start = log_moments(values);
    std::vector<std::optional<MemberResult>> members(static_cast<std::size_t>(config.n_fits));

    parallel_for(members.size(), [&](std::size_t k) {
        Stream stream = make_stream(config.seed, k);
        std::uniform_int_distribution<int> pick(config.bins_lo, config.bins_hi);
        const int n_bins = pick(stream);
        try {
            const Histogram hist = build_histogram(values, config.lo, config.hi, n_bins);
            const LognormalFit fit = fit_histogram(hist, start);
            if (fit.converged) members[k] = MemberResult{fit.params.mu(), fit.params.sigma()};
        } catch (const std::invalid_argument&) {
            // too few populated bins at this resolution; counted as failed
        }
    });

    std::vector<double> mu, sigma, mean, median;
    int failed = 0;
    for (const auto& m : members) {
        if (!m) {
            ++failed;
            continue;
        }
        mu.push_back(m->mu);
        sigma.push_back(m->sigma);
        mean.push_back(std::exp(m->mu + 0.5 * m->sigma * m->sigma));
        median.push_back(std::exp(m->mu));
    }
    if (mu.empty()) throw EnsembleFailure("every ensemble fit failed");

    FitEnsemble e;
    e.mu = summarize(std::move(mu));
    e.sigma = summarize(std::move(sigma));
    e.mean = summarize(std::move(mean));
    e.median = summarize(std::move(median));
    e.n_fits = config.n_fits;
    e.n_failed = failed;
    e.seed = config.seed;
    return e;
}

void to_json(nlohmann::ordered_json& j, const FitEnsemble& e) {
    auto pct = [](const Percentiles& p) {
        return nlohmann::ordered_json{{"p2_5", p.p2_5}, {"p50", p.p50}, {"p97_5", p.p97_5}};
    };
    j = nlohmann::ordered_json{
        {"mu", pct(e.mu)},
        {"sigma", pct(e.sigma)},
        {"mean", pct(e.mean)},
        {"median", pct(e.median)},
        {"n_fits", e.n_fits},
        {"n_failed", e.n_failed},
        {"seed", e.seed},
    };
}

}  // namespace fwci
