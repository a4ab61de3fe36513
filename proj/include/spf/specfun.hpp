#pragma once

namespace spf {

// Log of the gamma function for x > 0 (Lanczos approximation).
// Throws std::domain_error for x <= 0.
double log_gamma(double x);

// Derivative of log_gamma for x > 0 (recurrence shift + asymptotic series).
double digamma(double x);

} // namespace spf
