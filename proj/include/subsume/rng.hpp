#pragma once

#include <cstdint>

namespace subsume {

/// SplitMix64 generator. Used everywhere a seeded stream is needed so that
/// results are bit-identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        std::uint64_t x;
        do {
            x = next();
        } while (x < threshold);
        return x % n;
    }

    /// Derives an independent stream, e.g. per tree or per epoch.
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        Rng r(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
        return r.next();
    }

private:
    std::uint64_t state_;
};

/// Deterministic Fisher-Yates shuffle of indices [0, n).
template <typename T>
void shuffle_in_place(T* data, std::size_t n, Rng& rng) {
    if (n < 2) return;
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
        T tmp = data[i];
        data[i] = data[j];
        data[j] = tmp;
    }
}

}  // namespace subsume
