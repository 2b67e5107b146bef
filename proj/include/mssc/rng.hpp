#ifndef MSSC_RNG_HPP
#define MSSC_RNG_HPP

#include <cmath>
#include <cstdint>

namespace mssc {

/// Small deterministic generator (splitmix64 core). Results are identical
/// across platforms and runs for a given seed, which the experiment
/// pipeline relies on for byte-identical reruns.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection-free modulo bias is negligible here (n << 2^64), but
        // keep the multiply-shift trick for cheap unbiased-enough draws.
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    /// Standard normal via Box-Muller; pairs are cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Derive an independent stream, e.g. one per restart or worker.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        Rng mix(seed ^ (0x8af1d77c4c7ee3d9ULL * (stream + 1)));
        return mix.next_u64();
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mssc

#endif  // MSSC_RNG_HPP
