#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace arbphase {

// SplitMix64 finalizer. Used for all seed derivation so that derived streams
// are decorrelated even for adjacent indices.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic seed derivation: combine(seed, 0), combine(seed, 1), ... are
// independent of evaluation order, which is what makes grid runs
// reproducible under any parallelism.
constexpr std::uint64_t seed_combine(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed ^ (0x9e3779b97f4a7c15ULL + mix64(index)));
}

// Seeded random stream. The engine is std::mt19937_64 (bit-exact by the
// standard); all variate transforms are done here rather than with
// std::*_distribution, whose output is implementation defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on (0,1), 53-bit resolution, never exactly 0.
    double uniform01() {
        const std::uint64_t bits = gen_() >> 11;
        double u = static_cast<double>(bits) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return x % n;
    }

    // Standard normal via Marsaglia polar; one spare cached per pair.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // k distinct indices from {0,...,pool-1}, partial Fisher-Yates.
    // Output order is the sampling order (not sorted).
    void sample_indices(std::size_t pool, std::size_t k, std::vector<std::uint32_t>& out) {
        if (k > pool) throw std::invalid_argument("sample_indices: k exceeds pool");
        scratch_.resize(pool);
        for (std::size_t i = 0; i < pool; ++i) scratch_[i] = static_cast<std::uint32_t>(i);
        out.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform_below(pool - i));
            std::swap(scratch_[i], scratch_[j]);
            out[i] = scratch_[i];
        }
    }

private:
    std::mt19937_64 gen_;
    std::vector<std::uint32_t> scratch_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace arbphase
