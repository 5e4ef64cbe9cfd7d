#pragma once

#include "rcn/prng.hpp"
#include "rcn/tensor.hpp"

namespace rcn {

struct LossValue {
    double value = 0.0;
    Tensor grad;  // d value / d prediction
};

// y = W x + b
struct FcLayer {
    Tensor W;  // [out x in]
    Tensor b;  // [out]

    FcLayer() = default;
    FcLayer(std::size_t out, std::size_t in) : W({out, in}), b({out}) {}

    Tensor forward(const Tensor& x) const;

    struct Grads {
        Tensor grad_x, grad_W, grad_b;
    };
    Grads backward(const Tensor& x, const Tensor& grad_y) const;
};

// y = c (*) pad(x), circular convolution of the input zero-padded from
// length M to length N, computed through the FFT path.
struct CirculantLayer {
    Tensor c;           // [N]
    std::size_t m_in;   // M <= N

    CirculantLayer() = default;
    CirculantLayer(std::size_t n, std::size_t m);

    Tensor forward(const Tensor& x) const;

    struct Grads {
        Tensor grad_x, grad_c;
    };
    Grads backward(const Tensor& x, const Tensor& grad_y) const;

    // Dense circ(c) matrix, rows circularly shifted c. Oracle/export use.
    Tensor dense_matrix() const;
};

enum class Mode { Train, Infer };

// Inverted dropout. make_mask draws the keep/scale mask; forward and
// backward both multiply by it, so a saved mask makes the pair exactly
// differentiable for gradient checks.
struct Dropout {
    double p = 0.5;

    Tensor make_mask(const std::vector<std::size_t>& shape, Mode mode, Prng& rng) const;
    static Tensor apply(const Tensor& x, const Tensor& mask);
};

double sigmoid(double x);
// grad_x given the forward output y = sigmoid(x).
double sigmoid_grad_from_output(double y, double grad_out);

// (1/B) * sum_i ||pred_i - target_i||^2 over the leading batch axis.
LossValue euclidean_loss(const Tensor& pred, const Tensor& target);

// Standard binary cross-entropy with the probability clamped to
// [kBceEps, 1 - kBceEps] before the logarithms. LossValue.grad is the
// 1-element d/dprob (zero where the clamp is active).
inline constexpr double kBceEps = 1e-7;
LossValue bce_loss(double prob, int label);

}  // namespace rcn
