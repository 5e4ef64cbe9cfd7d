#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace rcn {

// In-place iterative radix-2 FFT; v.size() must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& v, bool inverse);

// DFT of arbitrary length. Power-of-two sizes go through the radix-2
// path directly; everything else uses Bluestein's chirp-z reduction to
// a power-of-two circular convolution. Inverse includes the 1/n scale.
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& v,
                                      bool inverse);

}  // namespace rcn
