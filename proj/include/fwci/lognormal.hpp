#pragma once

// Lognormal citation-impact model.
//
// A value X is lognormal(mu, sigma) when ln X ~ Normal(mu, sigma). Binned
// counts are modelled without normalisation as
//
//     f(x) = (A / x) * exp(-(ln x - mu)^2 / (2 sigma^2))
//
// where A absorbs sample size and bin width. Setting A = 1 / (sigma sqrt(2 pi))
// gives the density itself. The ln-value view fits the Gaussian
// A' * exp(-(t - mu)^2 / (2 sigma^2)) with the same (mu, sigma).

#include <cstdint>
#include <limits>
#include <optional>
#include <span>

#include <json.hpp>

#include "fwci/errors.hpp"
#include "fwci/histogram.hpp"

namespace fwci {

class LognormalParams {
public:
    // Throws std::invalid_argument unless mu is finite and sigma > 0.
    LognormalParams(double mu, double sigma);

    double mu() const { return mu_; }
    double sigma() const { return sigma_; }

    friend bool operator==(const LognormalParams&, const LognormalParams&) = default;

private:
    double mu_;
    double sigma_;
};

void to_json(nlohmann::ordered_json& j, const LognormalParams& p);

// Standard normal CDF and its inverse.
double normal_cdf(double z);
double normal_quantile(double p);

// x must be > 0 (std::invalid_argument otherwise).
double pdf(double x, const LognormalParams& params);
double scaled_model(double x, double amplitude, const LognormalParams& params);

// Phi((ln x - mu) / sigma).
double percentile_of(double x, const LognormalParams& params);

struct DerivedStats {
    double mean = 0;    // e^(mu + sigma^2 / 2)
    double median = 0;  // e^mu
    double mode = 0;    // e^(mu - sigma^2)
    double coverage = 0.95;
    double interval_lo = 0;  // central distribution quantiles at `coverage`
    double interval_hi = 0;
};

DerivedStats derived_stats(const LognormalParams& params, double coverage = 0.95);

void to_json(nlohmann::ordered_json& j, const DerivedStats& s);

// Bins whose centers fall outside [min_center, max_center] are left out of
// the objective.
struct FitWindow {
    double min_center = -std::numeric_limits<double>::infinity();
    double max_center = std::numeric_limits<double>::infinity();
};

struct LognormalFit {
    double amplitude = 0;
    LognormalParams params{0.0, 1.0};
    int n_bins_used = 0;
    double residual_norm = 0;  // sqrt of the residual sum of squares
    bool converged = false;
    int iterations = 0;
};

void to_json(nlohmann::ordered_json& j, const LognormalFit& f);

// Unweighted least squares of bin counts against scaled_model at the bin
// centers, by damped Gauss-Newton (Levenberg-Marquardt). Empty bins stay in
// the objective; bins with non-positive centers are skipped. Without an
// explicit start, (mu, sigma) start at the count-weighted moments of ln(center).
//
// Throws std::invalid_argument when fewer than 4 usable bins are non-empty.
// Hitting the iteration cap returns the last iterate with converged = false.
LognormalFit fit_histogram(const Histogram& hist,
                           std::optional<LognormalParams> init = std::nullopt,
                           FitWindow window = {});

// Gaussian fit to a histogram of ln-values. Same contract as fit_histogram.
LognormalFit fit_normal_log(const Histogram& hist,
                            FitWindow window = {},
                            std::optional<LognormalParams> init = std::nullopt);

// The same fits over arbitrary binned data: bin centers with real-valued
// counts (for model-generated expectations rather than sampled tallies).
LognormalFit fit_histogram(std::span<const double> centers, std::span<const double> counts,
                           std::optional<LognormalParams> init = std::nullopt,
                           FitWindow window = {});
LognormalFit fit_normal_log(std::span<const double> centers, std::span<const double> counts,
                            FitWindow window = {},
                            std::optional<LognormalParams> init = std::nullopt);

// Closed-form least-squares amplitude for fixed (mu, sigma).
double best_amplitude(const Histogram& hist, const LognormalParams& params, FitWindow window = {});

struct Percentiles {
    double p2_5 = 0;
    double p50 = 0;
    double p97_5 = 0;
};

struct FitEnsemble {
    Percentiles mu;
    Percentiles sigma;
    Percentiles mean;    // e^(mu + sigma^2 / 2) per member
    Percentiles median;  // e^mu per member
    int n_fits = 0;
    int n_failed = 0;
    std::uint64_t seed = 0;
};

void to_json(nlohmann::ordered_json& j, const FitEnsemble& e);

struct EnsembleConfig {
    double lo = 0.0;
    double hi = 8.0;
    int bins_lo = 20;
    int bins_hi = 800;
    int n_fits = 10000;
    std::uint64_t seed = 1;
};

class EnsembleFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Repeats fit_histogram over bin counts drawn uniformly from
// [bins_lo, bins_hi]. Member k draws its bin count from make_stream(seed, k),
// so the result is identical at any thread count. Non-converged members are
// counted in n_failed; EnsembleFailure when none converge.
FitEnsemble ensemble_fit(std::span<const double> values, const EnsembleConfig& config);

}  // namespace fwci
