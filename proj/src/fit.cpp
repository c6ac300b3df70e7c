#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fwci/lognormal.hpp"

namespace fwci {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-10;
constexpr double kMaxDamping = 1e16;
constexpr std::size_t kMinNonEmptyBins = 4;

// Both fits reduce to one problem in t: with t = ln(center) and weight
// 1/center the Gaussian below is the lognormal count model, with t = center
// and weight 1 it is the plain Gaussian of the ln-value view.
//
//     f_i = A * weight_i * exp(-(t_i - mu)^2 / (2 sigma^2))
struct BinnedProblem {
    std::vector<double> t;
    std::vector<double> weight;
    std::vector<double> y;
};

struct Solution {
    Eigen::Vector3d p;  // (A, mu, sigma)
    double cost = 0;
    bool converged = false;
    int iterations = 0;
};

bool admissible(const Eigen::Vector3d& p) {
    return p.allFinite() && p[0] > 0.0 && p[2] > 0.0;
}

// Sum of squared residuals; fills J^T J and J^T r.
double evaluate(const BinnedProblem& pb, const Eigen::Vector3d& p,
                Eigen::Matrix3d& jtj, Eigen::Vector3d& jtr) {
    const double a = p[0], mu = p[1], sigma = p[2];
    const double inv_var = 1.0 / (sigma * sigma);
    jtj.setZero();
    jtr.setZero();
    double cost = 0.0;
    for (std::size_t i = 0; i < pb.t.size(); ++i) {
        const double d = pb.t[i] - mu;
        const double g = pb.weight[i] * std::exp(-0.5 * d * d * inv_var);
        const double f = a * g;
        const double r = pb.y[i] - f;
        const Eigen::Vector3d grad(g, f * d * inv_var, f * d * d * inv_var / sigma);
        jtj.noalias() += grad * grad.transpose();
        jtr.noalias() += grad * r;
        cost += r * r;
    }
    return cost;
}

Solution levenberg_marquardt(const BinnedProblem& pb, Eigen::Vector3d p) {
    Solution out;
    Eigen::Matrix3d jtj;
    Eigen::Vector3d jtr;
    double cost = evaluate(pb, p, jtj, jtr);
    double lambda = 1e-3;

    Eigen::Matrix3d trial_jtj;
    Eigen::Vector3d trial_jtr;
    int it = 0;
    while (it < kMaxIterations) {
        ++it;
        if (cost == 0.0) {
            out.converged = true;
            break;
        }
        Eigen::Matrix3d damped = jtj;
        for (int k = 0; k < 3; ++k) {
            damped(k, k) += lambda * std::max(jtj(k, k), 1e-300);
        }
        const Eigen::Vector3d step = damped.ldlt().solve(jtr);
        // Location and spread are both measured in units of sigma.
        const double rel = std::max({std::abs(step[0]) / p[0],
                                     std::abs(step[1]) / p[2],
                                     std::abs(step[2]) / p[2]});
        const Eigen::Vector3d trial = p + step;

        if (step.allFinite() && admissible(trial)) {
            const double trial_cost = evaluate(pb, trial, trial_jtj, trial_jtr);
            if (trial_cost <= cost) {
                p = trial;
                cost = trial_cost;
                jtj = trial_jtj;
                jtr = trial_jtr;
                lambda = std::max(lambda * 0.1, 1e-12);
                if (rel < kStepTolerance) {
                    out.converged = true;
                    break;
                }
                continue;
            }
        }
        // A rejected, essentially undamped step this small means the iterate
        // already sits at the minimum to working precision.
        if (step.allFinite() && rel < kStepTolerance && lambda <= 1.0) {
            out.converged = true;
            break;
        }
        lambda *= 10.0;
        if (lambda > kMaxDamping) break;
    }
    out.p = p;
    out.cost = cost;
    out.iterations = it;
    return out;
}

struct Start {
    double mu;
    double sigma;
};

// Count-weighted moments of t over the problem's bins.
Start moment_start(const BinnedProblem& pb, double fallback_sigma) {
    double n = 0, s1 = 0;
    for (std::size_t i = 0; i < pb.t.size(); ++i) {
        n += pb.y[i];
        s1 += pb.y[i] * pb.t[i];
    }
    const double mean = s1 / n;
    double s2 = 0;
    for (std::size_t i = 0; i < pb.t.size(); ++i) {
        s2 += pb.y[i] * (pb.t[i] - mean) * (pb.t[i] - mean);
    }
    double sd = std::sqrt(s2 / n);
    if (!(sd > 0.0) || !std::isfinite(sd)) sd = fallback_sigma;
    return {mean, sd};
}

double closed_form_amplitude(const BinnedProblem& pb, double mu, double sigma) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < pb.t.size(); ++i) {
        const double d = (pb.t[i] - mu) / sigma;
        const double g = pb.weight[i] * std::exp(-0.5 * d * d);
        num += pb.y[i] * g;
        den += g * g;
    }
    return den > 0.0 ? num / den : 0.0;
}

// Scale the model so it passes through the tallest bin.
double tallest_bin_amplitude(const BinnedProblem& pb, double mu, double sigma) {
    const auto top = static_cast<std::size_t>(
        std::max_element(pb.y.begin(), pb.y.end()) - pb.y.begin());
    const double d = (pb.t[top] - mu) / sigma;
    const double g = pb.weight[top] * std::exp(-0.5 * d * d);
    const double a = pb.y[top] / g;
    if (std::isfinite(a) && a > 0.0) return a;
    return closed_form_amplitude(pb, mu, sigma);
}

enum class Axis { log_of_center, center };

BinnedProblem make_problem(std::span<const double> centers, std::span<const double> counts,
                           FitWindow window, Axis axis) {
    if (centers.size() != counts.size()) throw std::invalid_argument("centers and counts differ in length");
    BinnedProblem pb;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double c = centers[i];
        if (c < window.min_center || c > window.max_center) continue;
        if (!(counts[i] >= 0.0) || !std::isfinite(counts[i])) throw std::invalid_argument("bin counts must be finite and >= 0");
        if (axis == Axis::log_of_center) {
            if (!(c > 0.0)) continue;
            pb.t.push_back(std::log(c));
            pb.weight.push_back(1.0 / c);
        } else {
            pb.t.push_back(c);
            pb.weight.push_back(1.0);
        }
        pb.y.push_back(counts[i]);
    }
    const auto non_empty = std::count_if(pb.y.begin(), pb.y.end(), [](double y) { return y > 0.0; });
    if (static_cast<std::size_t>(non_empty) < kMinNonEmptyBins) {
        throw std::invalid_argument("fit needs at least 4 non-empty bins");
    }
    return pb;
}

LognormalFit run_fit(std::span<const double> centers, std::span<const double> counts, FitWindow window,
                     Axis axis, std::optional<LognormalParams> init) {
    const BinnedProblem pb = make_problem(centers, counts, window, axis);
    const Start start = init ? Start{init->mu(), init->sigma()} : moment_start(pb, 0.5);
    const double a0 = tallest_bin_amplitude(pb, start.mu, start.sigma);
    const Solution sol = levenberg_marquardt(pb, Eigen::Vector3d(a0, start.mu, start.sigma));

    LognormalFit fit;
    fit.amplitude = sol.p[0];
    fit.params = LognormalParams(sol.p[1], sol.p[2]);
    fit.n_bins_used = static_cast<int>(pb.t.size());
    fit.residual_norm = std::sqrt(sol.cost);
    fit.converged = sol.converged && std::isfinite(fit.residual_norm);
    fit.iterations = sol.iterations;
    return fit;
}

std::vector<double> as_real(const Histogram& hist) {
    return std::vector<double>(hist.counts.begin(), hist.counts.end());
}

}  // namespace

LognormalFit fit_histogram(std::span<const double> centers, std::span<const double> counts,
                           std::optional<LognormalParams> init, FitWindow window) {
    return run_fit(centers, counts, window, Axis::log_of_center, init);
}

LognormalFit fit_normal_log(std::span<const double> centers, std::span<const double> counts,
                            FitWindow window, std::optional<LognormalParams> init) {
    return run_fit(centers, counts, window, Axis::center, init);
}

LognormalFit fit_histogram(const Histogram& hist, std::optional<LognormalParams> init, FitWindow window) {
    return fit_histogram(hist.centers, as_real(hist), init, window);
}

LognormalFit fit_normal_log(const Histogram& hist, FitWindow window, std::optional<LognormalParams> init) {
    return fit_normal_log(hist.centers, as_real(hist), window, init);
}

double best_amplitude(const Histogram& hist, const LognormalParams& params, FitWindow window) {
    BinnedProblem pb;
    for (std::size_t i = 0; i < hist.n_bins(); ++i) {
        const double c = hist.centers[i];
        if (!(c > 0.0) || c < window.min_center || c > window.max_center) continue;
        pb.t.push_back(std::log(c));
        pb.weight.push_back(1.0 / c);
        pb.y.push_back(static_cast<double>(hist.counts[i]));
    }
    return closed_form_amplitude(pb, params.mu(), params.sigma());
}

}  // namespace fwci
