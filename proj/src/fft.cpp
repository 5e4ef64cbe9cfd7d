#include "rcn/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace rcn {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

void fft_pow2(std::vector<std::complex<double>>& v, bool inverse) {
    const std::size_t n = v.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: size not a power of two");
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(v[i], v[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = v[i + j];
                std::complex<double> t = v[i + j + len / 2] * w;
                v[i + j] = u + t;
                v[i + j + len / 2] = u - t;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& z : v) z *= inv;
    }
}

std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& v,
                                      bool inverse) {
    const std::size_t n = v.size();
    if (n == 0) throw std::invalid_argument("dft: empty input");
    if (is_pow2(n)) {
        auto out = v;
        fft_pow2(out, inverse);
        return out;
    }
    // Bluestein: X_k = conj(w_k) * sum_j (v_j conj(w_j)) w_{k-j},
    // with w_j = exp(i*pi*j^2/n). The sum is a linear convolution,
    // evaluated with a power-of-two FFT of size >= 2n-1.
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<std::complex<double>> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        // j^2 mod 2n keeps the angle argument small for large n.
        const std::size_t j2 = (j * j) % (2 * n);
        const double ang = sign * M_PI * static_cast<double>(j2) / static_cast<double>(n);
        chirp[j] = {std::cos(ang), std::sin(ang)};
    }
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<std::complex<double>> a(m), b(m);
    for (std::size_t j = 0; j < n; ++j) a[j] = v[j] * chirp[j];
    b[0] = std::conj(chirp[0]);
    for (std::size_t j = 1; j < n; ++j)
        b[j] = b[m - j] = std::conj(chirp[j]);
    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
    fft_pow2(a, true);
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& z : out) z *= inv;
    }
    return out;
}

}  // namespace rcn
