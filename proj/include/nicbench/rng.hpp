#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace nicbench {

// Deterministic splitmix64 generator. The standard <random> engines are
// portable but the distributions are not, so uniform/normal sampling is
// implemented here to make runs bit-reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n). n must be >= 1.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Standard normal via Box-Muller; caches the second variate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        // Guard against log(0).
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double two_pi_u2 = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(two_pi_u2);
        has_spare_ = true;
        return r * std::cos(two_pi_u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i + 1));
            using std::swap;
            swap(v[i], v[j]);
        }
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Derives an independent seed for a named substream (window index, epoch, ...).
// Used so parallel and serial generation orders agree.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    Rng mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    return mix.next_u64();
}

}  // namespace nicbench
