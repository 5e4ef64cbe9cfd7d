#pragma once

#include <functional>

#include "rcn/tensor.hpp"

namespace rcn {

// ---------------------------------------------------------------------------
// Optimized kernels. Loop nests are arranged so every output element is
// accumulated serially in a fixed order and owned by exactly one OpenMP
// thread, so parallel and serial runs produce bitwise-identical results.
// All accumulation is in 64-bit.
// ---------------------------------------------------------------------------

// C[m x p] = A[m x k] * B[k x p]
Tensor matmul(const Tensor& a, const Tensor& b);

// y = A * x for A[m x n], x[n]
Tensor matvec(const Tensor& a, const Tensor& x);

// Same-padded 2-D cross-correlation.
//   x    [h x w x c_in]
//   k    [kh x kw x c_in x c_out], kh and kw odd
//   bias [c_out]
// Output [h x w x c_out]; zero padding (kh-1)/2, (kw-1)/2.
Tensor conv2d_same(const Tensor& x, const Tensor& k, const Tensor& bias);

struct ConvGrads {
    Tensor grad_x;
    Tensor grad_k;
    Tensor grad_bias;
};

ConvGrads conv2d_same_grads(const Tensor& x, const Tensor& k, const Tensor& grad_out);

// Valid (no padding) strided cross-correlation, used by the discriminator.
// Output spatial extent: floor((h - kh) / stride) + 1.
Tensor conv2d_valid(const Tensor& x, const Tensor& k, const Tensor& bias,
                    std::size_t stride);

ConvGrads conv2d_valid_grads(const Tensor& x, const Tensor& k, const Tensor& grad_out,
                             std::size_t stride);

Tensor relu(const Tensor& x);
Tensor relu_grad(const Tensor& x, const Tensor& grad_out);

// y[i] = sum_j c[(i-j) mod n] * x[j], O(n^2) reference path.
Tensor circular_convolve_direct(const Tensor& c, const Tensor& x);

// Same product through the arbitrary-length DFT (Bluestein for non
// power-of-two n). Agrees with the direct path to ~1e-12 at n = 1089.
Tensor circular_convolve_fft(const Tensor& c, const Tensor& x);

// Central finite-difference check of an analytic gradient.
// fn(params) returns the scalar value; analytic_grad holds dfn/dparams.
// Returns max over entries of |a - f| / max(|a|, |f|, 1e-8).
double grad_check(const std::function<double(const Tensor&)>& fn,
                  const Tensor& params, const Tensor& analytic_grad, double eps);

// ---------------------------------------------------------------------------
// Naive serial reference implementations, kept for oracle tests and the
// kernel benchmark. Textbook loops, no pragmas, no hoisting.
// ---------------------------------------------------------------------------
namespace ref {

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor conv2d_same(const Tensor& x, const Tensor& k, const Tensor& bias);
ConvGrads conv2d_same_grads(const Tensor& x, const Tensor& k, const Tensor& grad_out);

}  // namespace ref

}  // namespace rcn
