#pragma once

#include "spf/rng.hpp"

#include <utility>

namespace spf {

// Shape-rate gamma parameterization (mean = shape / rate) throughout.
struct GammaParams {
    double shape;
    double rate;
};

// log Gamma(x | shape, rate); -inf for x <= 0.
double gamma_logpdf(double x, GammaParams p);

// Gradient of gamma_logpdf with respect to (shape, rate) at fixed x.
// d_shape = log(rate) - digamma(shape) + log(x)
// d_rate  = shape/rate - x
struct GammaScore {
    double d_shape;
    double d_rate;
};
GammaScore gamma_score_grad(double x, GammaParams p);

// Gamma(shape, rate) draw. Marsaglia-Tsang for shape >= 1; for shape < 1
// a Gamma(shape + 1) draw is boosted by U^(1/shape).
double gamma_sample(GammaParams p, RandomState& rng);

// log Pois(y | rate); rate must be > 0.
double poisson_logpmf(std::uint64_t y, double rate);

} // namespace spf
