#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "rcn/tensor.hpp"

namespace rcn {

// Deterministic generator built on splitmix64. Same seed gives the same
// draw sequence on every platform: only 64-bit integer arithmetic and
// IEEE double ops are involved. Gaussian draws use Box-Muller with the
// second variate cached, consumed in flat row-major traversal order.
class Prng {
public:
    explicit Prng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 bits of mantissa.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Modulo reduction; the bias is far below
    // anything observable at the sample sizes used here.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Prng::next_below: n == 0");
        return next_u64() % n;
    }

    double next_gaussian(double mean, double std) {
        if (std < 0.0) throw std::invalid_argument("Prng::next_gaussian: std < 0");
        if (has_spare_) {
            has_spare_ = false;
            return mean + std * spare_;
        }
        // u1 in (0,1] so the log is finite.
        double u1 = 1.0 - next_double();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return mean + std * (r * std::cos(a));
    }

    // Derives an independent substream seed for a counter (block index,
    // sample index). One extra splitmix scramble keeps neighbouring
    // counters uncorrelated.
    static std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t counter) {
        Prng p(seed ^ (counter * 0xD1B54A32D192ED03ULL + 0x8BB84B93962EACC9ULL));
        return p.next_u64();
    }

private:
    std::uint64_t state_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Fills t with i.i.d. N(mean, std^2) draws in flat index order.
inline Tensor& gaussian_fill(Tensor& t, double mean, double std, Prng& rng) {
    if (std < 0.0) throw std::invalid_argument("gaussian_fill: std < 0");
    for (std::size_t i = 0; i < t.numel(); ++i)
        t[i] = rng.next_gaussian(mean, std);
    return t;
}

}  // namespace rcn
