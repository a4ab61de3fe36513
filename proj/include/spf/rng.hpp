#pragma once

#include <cstdint>
#include <string_view>

namespace spf {

// Seedable 64-bit generator (xoshiro256**, seeded through splitmix64).
// Every stochastic operation in the library takes an explicit RandomState;
// independent sub-streams are obtained with fork() so that one top-level
// seed reproduces a whole run.
class RandomState {
public:
    explicit RandomState(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1).
    double uniform();

    // Standard normal (Marsaglia polar method).
    double normal();

    // Poisson draw; inversion for small means, PTRS rejection otherwise.
    std::uint64_t poisson(double mean);

    // Independent stream derived from this state's seed, a label and an index.
    RandomState fork(std::string_view label, std::uint64_t index = 0) const;

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace spf
