#include "fwci/lognormal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace fwci {

LognormalParams::LognormalParams(double mu, double sigma) : mu_(mu), sigma_(sigma) {
    if (!std::isfinite(mu)) throw std::invalid_argument("lognormal mu must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("lognormal sigma must be positive and finite");
    }
}

void to_json(nlohmann::ordered_json& j, const LognormalParams& p) {
    j = nlohmann::ordered_json{{"mu", p.mu()}, {"sigma", p.sigma()}};
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal quantile needs p in (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

namespace {

void require_positive(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("lognormal argument must be positive");
}

double kernel(double x, const LognormalParams& p) {
    const double z = (std::log(x) - p.mu()) / p.sigma();
    return std::exp(-0.5 * z * z);
}

}  // namespace

double pdf(double x, const LognormalParams& params) {
    require_positive(x);
    const double norm = 1.0 / (x * params.sigma() * std::sqrt(2.0 * std::numbers::pi));
    return norm * kernel(x, params);
}

double scaled_model(double x, double amplitude, const LognormalParams& params) {
    require_positive(x);
    if (!(amplitude > 0.0)) throw std::invalid_argument("model amplitude must be positive");
    return amplitude / x * kernel(x, params);
}

double percentile_of(double x, const LognormalParams& params) {
    require_positive(x);
    return normal_cdf((std::log(x) - params.mu()) / params.sigma());
}

DerivedStats derived_stats(const LognormalParams& params, double coverage) {
    if (!(coverage > 0.0 && coverage < 1.0)) throw std::invalid_argument("coverage must lie in (0, 1)");
    const double mu = params.mu();
    const double var = params.sigma() * params.sigma();
    DerivedStats s;
    s.mean = std::exp(mu + 0.5 * var);
    s.median = std::exp(mu);
    s.mode = std::exp(mu - var);
    s.coverage = coverage;
    const double tail = 0.5 * (1.0 - coverage);
    s.interval_lo = std::exp(mu + normal_quantile(tail) * params.sigma());
    s.interval_hi = std::exp(mu + normal_quantile(1.0 - tail) * params.sigma());
    return s;
}

void to_json(nlohmann::ordered_json& j, const DerivedStats& s) {
    j = nlohmann::ordered_json{
        {"mean", s.mean},
        {"median", s.median},
        {"mode", s.mode},
        {"coverage", s.coverage},
        {"interval_lo", s.interval_lo},
        {"interval_hi", s.interval_hi},
    };
}

void to_json(nlohmann::ordered_json& j, const LognormalFit& f) {
    j = nlohmann::ordered_json{
        {"amplitude", f.amplitude},
        {"mu", f.params.mu()},
        {"sigma", f.params.sigma()},
        {"n_bins_used", f.n_bins_used},
        {"residual_norm", f.residual_norm},
        {"converged", f.converged},
        {"iterations", f.iterations},
    };
}

}  // namespace fwci
