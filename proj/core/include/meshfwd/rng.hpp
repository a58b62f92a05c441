#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace meshfwd::rng {

// splitmix64, used to expand one user seed into independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// One random stream. Backed by std::mt19937_64, whose output sequence is
// fixed by the C++ standard, with hand-rolled samplers so that results do
// not depend on the standard library's distribution implementations.
// Changing any sampler here changes every seeded simulation result.
class Stream {
public:
    Stream() : engine_(0) {}
    Stream(std::uint64_t seed, std::uint64_t stream_id)
        : engine_(splitmix64(seed ^ splitmix64(stream_id + 1))) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform integer in [0, n] by rejection-free modulo; the bias is
    // below 2^-53 for the small ranges used here (backoff windows).
    int uniform_int(int n) {
        return static_cast<int>(uniform01() * (n + 1));
    }

    // Exponential with the given mean (inverse transform).
    double exponential(double mean) {
        return -mean * std::log1p(-uniform01());
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace meshfwd::rng
