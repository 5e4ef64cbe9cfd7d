#include "rcn/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcn/kernels.hpp"

namespace rcn {

std::string phi_kind_name(PhiKind k) {
    switch (k) {
        case PhiKind::GaussianOrthonormal: return "gaussian-orthonormal";
        case PhiKind::Learned: return "learned";
        case PhiKind::Quantized: return "quantized";
    }
    throw std::logic_error("phi_kind_name: bad kind");
}

PhiKind phi_kind_from_name(const std::string& s) {
    if (s == "gaussian-orthonormal") return PhiKind::GaussianOrthonormal;
    if (s == "learned") return PhiKind::Learned;
    if (s == "quantized") return PhiKind::Quantized;
    throw std::invalid_argument("phi_kind_from_name: unknown kind '" + s + "'");
}

std::size_t mr_to_m(double mr, std::size_t n) {
    if (!(mr > 0.0) || mr > 1.0) throw std::invalid_argument("mr_to_m: mr out of (0,1]");
    if (n == kBlockPixels) {
        // Published counts for the four reported rates.
        const std::pair<double, std::size_t> table[] = {
            {0.25, 272}, {0.10, 109}, {0.04, 43}, {0.01, 10}};
        for (const auto& [r, m] : table)
            if (std::abs(mr - r) < 1e-12) return m;
    }
    const auto m = static_cast<std::size_t>(std::lround(mr * static_cast<double>(n)));
    return std::clamp<std::size_t>(m, 1, n);
}

MeasurementMatrix gen_gaussian_orthonormal(std::size_t n, double mr,
                                           std::uint64_t seed) {
    const std::size_t m = mr_to_m(mr, n);
    if (m > n) throw std::invalid_argument("gen_gaussian_orthonormal: m > n");
    const int max_attempts = 8;
    std::uint64_t s = seed;
    for (int attempt = 0; attempt < max_attempts; ++attempt, s = Prng::substream_seed(seed, attempt)) {
        Prng rng(s);
        Tensor phi({m, n});
        gaussian_fill(phi, 0.0, 1.0, rng);
        bool degenerate = false;
        // Modified Gram-Schmidt over rows, with one reorthogonalization
        // pass. The residual norm (the R diagonal) is positive, which
        // fixes the sign convention.
        for (std::size_t i = 0; i < m && !degenerate; ++i) {
            double* ri = phi.data() + i * n;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t j = 0; j < i; ++j) {
                    const double* rj = phi.data() + j * n;
                    double dot = 0.0;
                    for (std::size_t t = 0; t < n; ++t) dot += ri[t] * rj[t];
                    for (std::size_t t = 0; t < n; ++t) ri[t] -= dot * rj[t];
                }
            }
            double norm = 0.0;
            for (std::size_t t = 0; t < n; ++t) norm += ri[t] * ri[t];
            norm = std::sqrt(norm);
            if (norm < 1e-10) {
                degenerate = true;
                break;
            }
            const double inv = 1.0 / norm;
            for (std::size_t t = 0; t < n; ++t) ri[t] *= inv;
        }
        if (degenerate) continue;
        MeasurementMatrix mm;
        mm.phi = std::move(phi);
        mm.mr = mr;
        mm.n = n;
        mm.m = m;
        mm.kind = PhiKind::GaussianOrthonormal;
        mm.seed = seed;
        return mm;
    }
    throw std::runtime_error("gen_gaussian_orthonormal: rank-deficient draws exhausted retries");
}

Tensor sense(const MeasurementMatrix& phi, const Tensor& x) {
    if (x.rank() != 1 || x.numel() != phi.n)
        throw std::invalid_argument("sense: block length mismatch");
    return matvec(phi.phi, x);
}

Tensor add_noise(const Tensor& y, const NoiseSpec& spec, Prng& rng) {
    if (spec.sigma_255 < 0.0) throw std::invalid_argument("add_noise: sigma < 0");
    Tensor out = y;
    const double sigma = spec.sigma_255 / 255.0;
    for (std::size_t i = 0; i < out.numel(); ++i)
        out[i] += rng.next_gaussian(0.0, sigma);
    return out;
}

MeasurementMatrix quantize_matrix(const MeasurementMatrix& phi, int bits) {
    if (bits < 1 || bits > 16)
        throw std::invalid_argument("quantize_matrix: bits out of [1,16]");
    const auto [lo_it, hi_it] =
        std::minmax_element(phi.phi.vec().begin(), phi.phi.vec().end());
    const double lo = *lo_it, hi = *hi_it;
    MeasurementMatrix out = phi;
    out.kind = PhiKind::Quantized;
    out.bits = bits;
    if (hi == lo) return out;  // single level
    const double levels = static_cast<double>((1u << bits) - 1);
    const double step = (hi - lo) / levels;
    for (double& v : out.phi.vec())
        v = lo + std::round((v - lo) / step) * step;
    return out;
}

double estimate_noise_sigma(const std::vector<std::pair<Tensor, Tensor>>& blocks,
                            const MeasurementMatrix& phi) {
    if (blocks.empty()) throw std::invalid_argument("estimate_noise_sigma: no blocks");
    std::vector<double> sigmas;
    sigmas.reserve(blocks.size());
    for (const auto& [y, xhat] : blocks) {
        Tensor yhat = sense(phi, xhat);
        require_same_shape(y, yhat, "estimate_noise_sigma");
        double acc = 0.0;
        for (std::size_t i = 0; i < y.numel(); ++i) {
            const double d = y[i] - yhat[i];
            acc += d * d;
        }
        sigmas.push_back(std::sqrt(acc / static_cast<double>(phi.m)));
    }
    std::sort(sigmas.begin(), sigmas.end());
    const std::size_t k = sigmas.size();
    return k % 2 == 1 ? sigmas[k / 2] : 0.5 * (sigmas[k / 2 - 1] + sigmas[k / 2]);
}

}  // namespace rcn
