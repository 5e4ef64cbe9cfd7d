#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rcn/prng.hpp"
#include "rcn/tensor.hpp"

namespace rcn {

inline constexpr std::size_t kBlockSide = 33;
inline constexpr std::size_t kBlockPixels = kBlockSide * kBlockSide;  // 1089

enum class PhiKind { GaussianOrthonormal, Learned, Quantized };

std::string phi_kind_name(PhiKind k);
PhiKind phi_kind_from_name(const std::string& s);

struct MeasurementMatrix {
    Tensor phi;  // [m x n]
    double mr = 0.0;
    std::size_t n = 0;
    std::size_t m = 0;
    PhiKind kind = PhiKind::GaussianOrthonormal;
    std::uint64_t seed = 0;  // 0 for learned matrices
    int bits = 0;            // quantization depth, 0 when unquantized
};

// Noise level on the 0..255 dynamic range; internally pixels live in
// [0,1], so sigma_255 = 10 injects N(0, (10/255)^2).
struct NoiseSpec {
    double sigma_255 = 0.0;
};

// Measurement count for a rate. The four rates reported for n = 1089
// return the published counts {272, 109, 43, 10}, which do not all
// follow one rounding rule; other inputs use round(mr * n).
std::size_t mr_to_m(double mr, std::size_t n);

// i.i.d. Gaussian rows orthonormalized by modified Gram-Schmidt with a
// reorthogonalization pass. Deterministic in the seed.
MeasurementMatrix gen_gaussian_orthonormal(std::size_t n, double mr, std::uint64_t seed);

Tensor sense(const MeasurementMatrix& phi, const Tensor& x);

Tensor add_noise(const Tensor& y, const NoiseSpec& spec, Prng& rng);

// Uniform quantization to 2^bits levels over [min(phi), max(phi)].
// A constant matrix is returned unchanged (single level).
MeasurementMatrix quantize_matrix(const MeasurementMatrix& phi, int bits);

// Median over blocks of sqrt(||y_i - phi * xhat_i||^2 / m).
double estimate_noise_sigma(const std::vector<std::pair<Tensor, Tensor>>& blocks,
                            const MeasurementMatrix& phi);

}  // namespace rcn
