#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace leading {

// All randomness in this project flows through Rng. std::mt19937_64 output is
// fully specified by the standard, and the conversions below avoid
// std::uniform_*_distribution (whose algorithms are implementation-defined),
// so every draw is bit-identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return state_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(state_() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). Modulo bias is ~n/2^64, irrelevant here.
    std::uint64_t below(std::uint64_t n) { return state_() % n; }

    // Fisher-Yates; spelled out so the permutation does not depend on the
    // standard library's std::shuffle internals.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 state_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stable derivation of per-(epoch, batch) seeds from one run seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(base ^ (a * 0xd6e8feb86659fd93ULL)) ^ (b * 0xa3b195354a39b70dULL));
}

} // namespace leading
