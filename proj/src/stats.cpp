#include "spf/stats.hpp"

#include "spf/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spf {

double gamma_logpdf(double x, GammaParams p) {
    if (!(p.shape > 0.0) || !(p.rate > 0.0))
        throw std::domain_error("gamma_logpdf: shape and rate must be > 0");
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    return p.shape * std::log(p.rate) - log_gamma(p.shape) +
           (p.shape - 1.0) * std::log(x) - p.rate * x;
}

GammaScore gamma_score_grad(double x, GammaParams p) {
    if (!(p.shape > 0.0) || !(p.rate > 0.0))
        throw std::domain_error("gamma_score_grad: shape and rate must be > 0");
    if (!(x > 0.0)) throw std::domain_error("gamma_score_grad: x must be > 0");
    return {std::log(p.rate) - digamma(p.shape) + std::log(x),
            p.shape / p.rate - x};
}

double gamma_sample(GammaParams p, RandomState& rng) {
    if (!(p.shape > 0.0) || !(p.rate > 0.0))
        throw std::domain_error("gamma_sample: shape and rate must be > 0");
    double shape = p.shape;
    double boost = 1.0;
    if (shape < 1.0) {
        boost = std::pow(rng.uniform(), 1.0 / shape);
        shape += 1.0;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = (1.0 / 3.0) / std::sqrt(d);
    // Floored at the smallest normal double: for tiny shapes the boost
    // factor can underflow, and a zero draw has no finite log-density.
    const double floor = std::numeric_limits<double>::min();
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x)
            return std::max(boost * d * v / p.rate, floor);
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return std::max(boost * d * v / p.rate, floor);
    }
}

double poisson_logpmf(std::uint64_t y, double rate) {
    if (!(rate > 0.0)) throw std::domain_error("poisson_logpmf: rate must be > 0");
    const double yd = static_cast<double>(y);
    return yd * std::log(rate) - rate - log_gamma(yd + 1.0);
}

} // namespace spf
