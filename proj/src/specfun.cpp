#include "spf/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace spf {

namespace {

// Lanczos coefficients, g = 7, n = 9.
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

constexpr double kHalfLogTwoPi = 0.91893853320467274178;

} // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: x must be > 0");
    // Shift small arguments up for full Lanczos accuracy, then peel
    // back with log Gamma(x) = log Gamma(x+n) - sum log(x+i).
    double shift = 0.0;
    double xs = x;
    while (xs < 8.0) {
        shift += std::log(xs);
        xs += 1.0;
    }
    double a = kLanczos[0];
    const double t = xs + 6.5; // g + 0.5 with xs = z
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (xs - 1.0 + i);
    const double lg = kHalfLogTwoPi + (xs - 0.5) * std::log(t) - t + std::log(a);
    return lg - shift;
}

double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: x must be > 0");
    double result = 0.0;
    // psi(x) = psi(x+1) - 1/x until the asymptotic series is accurate.
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli-number tail of the asymptotic expansion.
    const double series = inv2 * (1.0 / 12.0 -
                          inv2 * (1.0 / 120.0 -
                          inv2 * (1.0 / 252.0 -
                          inv2 * (1.0 / 240.0 -
                          inv2 * (1.0 / 132.0 -
                          inv2 * (691.0 / 32760.0 -
                          inv2 * (1.0 / 12.0)))))));
    result += std::log(x) - 0.5 * inv - series;
    return result;
}

} // namespace spf
