#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string_view>

namespace fedauc {

namespace detail {

// splitmix64 finalizer; good avalanche, cheap to iterate.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

// Deterministic substream of pseudorandom numbers. Substreams are derived
// from a master seed plus a structured key (trial, client, purpose tag);
// identical keys give identical draws, distinct keys give independent draws.
// A single stream must not be shared across concurrent consumers.
class RngStream {
public:
    explicit RngStream(uint64_t seed) : engine_(detail::splitmix64(seed)) {}

    // Derive a child stream without consuming state of this one.
    static RngStream keyed(uint64_t master_seed, uint64_t trial,
                           uint64_t client, std::string_view purpose) {
        uint64_t s = detail::splitmix64(master_seed);
        s = detail::splitmix64(s ^ trial);
        s = detail::splitmix64(s ^ client);
        s = detail::splitmix64(s ^ detail::fnv1a(purpose));
        return RngStream(s);
    }

    uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (-1/2, 1/2); never returns the endpoints.
    double uniform_centered() {
        double u;
        do {
            u = uniform01() - 0.5;
        } while (u <= -0.5);
        return u;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        // rejection sampling to avoid modulo bias
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    double normal() { return normal_(engine_); }

    template <typename It>
    void shuffle(It first, It last) {
        std::shuffle(first, last, engine_);
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace fedauc
