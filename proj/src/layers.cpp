#include "rcn/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "rcn/kernels.hpp"

namespace rcn {

Tensor FcLayer::forward(const Tensor& x) const {
    if (x.rank() != 1 || x.extent(0) != W.extent(1))
        throw std::invalid_argument("FcLayer::forward: input length mismatch");
    Tensor y = matvec(W, x);
    for (std::size_t i = 0; i < y.numel(); ++i) y[i] += b[i];
    return y;
}

FcLayer::Grads FcLayer::backward(const Tensor& x, const Tensor& grad_y) const {
    const std::size_t out = W.extent(0), in = W.extent(1);
    if (grad_y.numel() != out || x.numel() != in)
        throw std::invalid_argument("FcLayer::backward: shape mismatch");
    Grads g{Tensor({in}), Tensor({out, in}), grad_y};
    for (std::size_t i = 0; i < out; ++i) {
        const double gy = grad_y[i];
        const double* wrow = W.data() + i * in;
        double* gwrow = g.grad_W.data() + i * in;
        for (std::size_t j = 0; j < in; ++j) {
            gwrow[j] = gy * x[j];
            g.grad_x[j] += wrow[j] * gy;
        }
    }
    return g;
}

namespace {

// v[(n - i) mod n]
Tensor cyclic_reverse(const Tensor& v) {
    const std::size_t n = v.numel();
    Tensor r({n});
    r[0] = v[0];
    for (std::size_t i = 1; i < n; ++i) r[i] = v[n - i];
    return r;
}

Tensor zero_pad(const Tensor& x, std::size_t n) {
    Tensor p({n});
    for (std::size_t i = 0; i < x.numel(); ++i) p[i] = x[i];
    return p;
}

}  // namespace

CirculantLayer::CirculantLayer(std::size_t n, std::size_t m) : c({n}), m_in(m) {
    if (m > n) throw std::invalid_argument("CirculantLayer: M > N");
}

Tensor CirculantLayer::forward(const Tensor& x) const {
    if (x.rank() != 1 || x.extent(0) != m_in)
        throw std::invalid_argument("CirculantLayer::forward: input length mismatch");
    return circular_convolve_fft(c, zero_pad(x, c.numel()));
}

CirculantLayer::Grads CirculantLayer::backward(const Tensor& x,
                                               const Tensor& grad_y) const {
    const std::size_t n = c.numel();
    if (grad_y.numel() != n || x.numel() != m_in)
        throw std::invalid_argument("CirculantLayer::backward: shape mismatch");
    // Both gradients are circular correlations, expressed as circular
    // convolutions with a cyclically reversed second argument.
    Tensor grad_c = circular_convolve_fft(grad_y, cyclic_reverse(zero_pad(x, n)));
    Tensor corr_x = circular_convolve_fft(grad_y, cyclic_reverse(c));
    Tensor grad_x({m_in});
    for (std::size_t i = 0; i < m_in; ++i) grad_x[i] = corr_x[i];
    return Grads{std::move(grad_x), std::move(grad_c)};
}

Tensor CirculantLayer::dense_matrix() const {
    const std::size_t n = c.numel();
    Tensor m({n, n});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m.at(i, j) = c[(i + n - j) % n];
    return m;
}

Tensor Dropout::make_mask(const std::vector<std::size_t>& shape, Mode mode,
                          Prng& rng) const {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("Dropout: p out of [0,1)");
    Tensor mask(shape);
    if (mode == Mode::Infer || p == 0.0) {
        mask.fill(1.0);
        return mask;
    }
    const double scale = 1.0 / (1.0 - p);
    for (std::size_t i = 0; i < mask.numel(); ++i)
        mask[i] = rng.next_double() < p ? 0.0 : scale;
    return mask;
}

Tensor Dropout::apply(const Tensor& x, const Tensor& mask) {
    require_same_shape(x, mask, "Dropout::apply");
    Tensor y = x;
    for (std::size_t i = 0; i < y.numel(); ++i) y[i] *= mask[i];
    return y;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double sigmoid_grad_from_output(double y, double grad_out) {
    return y * (1.0 - y) * grad_out;
}

LossValue euclidean_loss(const Tensor& pred, const Tensor& target) {
    require_same_shape(pred, target, "euclidean_loss");
    if (pred.rank() < 1 || pred.extent(0) < 1)
        throw std::invalid_argument("euclidean_loss: empty batch");
    const double batch = static_cast<double>(pred.extent(0));
    LossValue lv;
    lv.grad = Tensor(pred.shape());
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.numel(); ++i) {
        const double d = pred[i] - target[i];
        acc += d * d;
        lv.grad[i] = 2.0 / batch * d;
    }
    lv.value = acc / batch;
    return lv;
}

LossValue bce_loss(double prob, int label) {
    if (label != 0 && label != 1)
        throw std::invalid_argument("bce_loss: label must be 0 or 1");
    const bool clamped_lo = prob < kBceEps;
    const bool clamped_hi = prob > 1.0 - kBceEps;
    const double p = clamped_lo ? kBceEps : (clamped_hi ? 1.0 - kBceEps : prob);
    LossValue lv;
    lv.value = label == 1 ? -std::log(p) : -std::log(1.0 - p);
    lv.grad = Tensor({1});
    if (!clamped_lo && !clamped_hi)
        lv.grad[0] = label == 1 ? -1.0 / p : 1.0 / (1.0 - p);
    return lv;
}

}  // namespace rcn
