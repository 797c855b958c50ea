#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace crowdcheck {

// Seedable random stream. All simulation randomness flows through explicit
// Rng objects so runs are reproducible per master seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform double in [0, 1) built from the top 53 bits of one draw.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n);

    // Beta(a, b) via the two-gamma construction.
    double beta(double a, double b);

    double normal() { return std::normal_distribution<double>{}(engine_); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// Derives an independent stream for a named subsystem of one run, so extra
// draws in one subsystem never shift another (cascades, flags, tie-breaks...).
Rng substream(std::uint64_t master_seed, std::string_view name, std::uint64_t index = 0);

std::uint64_t mix_seed(std::uint64_t master_seed, std::string_view name, std::uint64_t index = 0);

}  // namespace crowdcheck
