#include "crowdcheck/rng.hpp"

namespace crowdcheck {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    // Lemire's rejection method; unbiased for every n.
    std::uint64_t x = engine_();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = engine_();
            m = static_cast<__uint128_t>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double Rng::beta(double a, double b) {
    const double x = std::gamma_distribution<double>(a, 1.0)(engine_);
    const double y = std::gamma_distribution<double>(b, 1.0)(engine_);
    const double s = x + y;
    if (s <= 0.0) return a / (a + b);  // both gammas underflowed
    return x / s;
}

std::uint64_t mix_seed(std::uint64_t master_seed, std::string_view name, std::uint64_t index) {
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ fnv1a(name));
    h = splitmix64(h ^ index);
    return h;
}

Rng substream(std::uint64_t master_seed, std::string_view name, std::uint64_t index) {
    return Rng(mix_seed(master_seed, name, index));
}

}  // namespace crowdcheck
