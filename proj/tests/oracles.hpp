#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library under test.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// Phi(z) from the Maclaurin series of erf, summed in long double.
// Accurate to ~1e-12 for |z| <= 5.
inline double normal_cdf_series(double z) {
    const long double x = static_cast<long double>(z) / std::numbers::sqrt2_v<long double>;
    long double term = x;  // x^(2n+1) / n!  with alternating sign
    long double sum = x;
    for (int n = 1; n < 400; ++n) {
        term *= -x * x / n;
        const long double add = term / (2 * n + 1);
        sum += add;
        if (std::fabs(add) < 1e-30L) break;
    }
    const long double erf = 2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum;
    return static_cast<double>(0.5L * (1.0L + erf));
}

// Composite Simpson rule with `intervals` (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int intervals) {
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// Draws from lognormal(mu, sigma) restricted to (lo, hi) by rejection, using
// the standard library distribution rather than the library's sampler.
inline std::vector<double> truncated_lognormal(double mu, double sigma, std::size_t n, double lo, double hi,
                                               unsigned long long seed) {
    std::mt19937_64 gen(seed);
    std::lognormal_distribution<double> dist(mu, sigma);
    std::vector<double> out;
    out.reserve(n);
    while (out.size() < n) {
        const double x = dist(gen);
        if (x > lo && x < hi) out.push_back(x);
    }
    return out;
}

// Counts values in [lo, hi) by direct scan.
inline std::size_t count_in(const std::vector<double>& values, double lo, double hi) {
    std::size_t n = 0;
    for (double v : values) n += (v >= lo && v < hi) ? 1 : 0;
    return n;
}

}  // namespace oracle
