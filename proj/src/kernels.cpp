#include "rcn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "rcn/fft.hpp"

namespace rcn {

namespace {

void require_rank(const Tensor& t, std::size_t r, const char* op) {
    if (t.rank() != r)
        throw std::invalid_argument(std::string(op) + ": expected rank " +
                                    std::to_string(r) + ", got " + t.shape_str());
}

void check_conv_shapes(const Tensor& x, const Tensor& k, const char* op) {
    require_rank(x, 3, op);
    require_rank(k, 4, op);
    if (k.extent(0) % 2 == 0 || k.extent(1) % 2 == 0)
        throw std::invalid_argument(std::string(op) + ": kernel extents must be odd");
    if (k.extent(2) != x.extent(2))
        throw std::invalid_argument(std::string(op) + ": channel mismatch " +
                                    x.shape_str() + " vs " + k.shape_str());
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank(a, 2, "matmul");
    require_rank(b, 2, "matmul");
    const std::size_t m = a.extent(0), kk = a.extent(1), p = b.extent(1);
    if (b.extent(0) != kk)
        throw std::invalid_argument("matmul: inner extent mismatch " + a.shape_str() +
                                    " vs " + b.shape_str());
    Tensor c({m, p});
    const double* A = a.data();
    const double* B = b.data();
    double* C = c.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
        double* crow = C + i * p;
        for (std::size_t t = 0; t < kk; ++t) {
            const double av = A[i * kk + t];
            const double* brow = B + t * p;
            for (std::size_t j = 0; j < p; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

Tensor matvec(const Tensor& a, const Tensor& x) {
    require_rank(a, 2, "matvec");
    if (x.rank() != 1 || x.extent(0) != a.extent(1))
        throw std::invalid_argument("matvec: shape mismatch " + a.shape_str() + " vs " +
                                    x.shape_str());
    const std::size_t m = a.extent(0), n = a.extent(1);
    Tensor y({m});
    const double* A = a.data();
    const double* X = x.data();
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        const double* arow = A + i * n;
        for (std::size_t j = 0; j < n; ++j) acc += arow[j] * X[j];
        y[i] = acc;
    }
    return y;
}

Tensor conv2d_same(const Tensor& x, const Tensor& k, const Tensor& bias) {
    check_conv_shapes(x, k, "conv2d_same");
    const std::size_t h = x.extent(0), w = x.extent(1), cin = x.extent(2);
    const std::size_t kh = k.extent(0), kw = k.extent(1), cout = k.extent(3);
    if (bias.numel() != cout)
        throw std::invalid_argument("conv2d_same: bias length mismatch");
    const std::ptrdiff_t ph = (kh - 1) / 2, pw = (kw - 1) / 2;
    Tensor y({h, w, cout});
    const double* X = x.data();
    const double* K = k.data();
    double* Y = y.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t oy = 0; oy < static_cast<std::ptrdiff_t>(h); ++oy) {
        for (std::size_t ox = 0; ox < w; ++ox) {
            double* yp = Y + (oy * w + ox) * cout;
            for (std::size_t o = 0; o < cout; ++o) yp[o] = bias[o];
        }
        for (std::size_t ky = 0; ky < kh; ++ky) {
            const std::ptrdiff_t iy = oy + static_cast<std::ptrdiff_t>(ky) - ph;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
            for (std::size_t kx = 0; kx < kw; ++kx) {
                const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - pw;
                const std::size_t ox0 = dx < 0 ? static_cast<std::size_t>(-dx) : 0;
                const std::size_t ox1 =
                    std::min<std::ptrdiff_t>(w, static_cast<std::ptrdiff_t>(w) - dx);
                if (cout == 1) {
                    const double* kp = K + (ky * kw + kx) * cin;
                    for (std::size_t ox = ox0; ox < ox1; ++ox) {
                        const std::size_t ix = ox + dx;
                        const double* xp = X + (iy * w + ix) * cin;
                        double acc = 0.0;
                        for (std::size_t ci = 0; ci < cin; ++ci) acc += xp[ci] * kp[ci];
                        Y[oy * w + ox] += acc;
                    }
                    continue;
                }
                for (std::size_t ox = ox0; ox < ox1; ++ox) {
                    const std::size_t ix = ox + dx;
                    const double* xp = X + (iy * w + ix) * cin;
                    double* yp = Y + (oy * w + ox) * cout;
                    for (std::size_t ci = 0; ci < cin; ++ci) {
                        const double xv = xp[ci];
                        const double* kp = K + ((ky * kw + kx) * cin + ci) * cout;
                        for (std::size_t o = 0; o < cout; ++o) yp[o] += xv * kp[o];
                    }
                }
            }
        }
    }
    return y;
}

ConvGrads conv2d_same_grads(const Tensor& x, const Tensor& k, const Tensor& grad_out) {
    check_conv_shapes(x, k, "conv2d_same_grads");
    const std::size_t h = x.extent(0), w = x.extent(1), cin = x.extent(2);
    const std::size_t kh = k.extent(0), kw = k.extent(1), cout = k.extent(3);
    if (grad_out.rank() != 3 || grad_out.extent(0) != h || grad_out.extent(1) != w ||
        grad_out.extent(2) != cout)
        throw std::invalid_argument("conv2d_same_grads: grad_out shape mismatch");
    const std::ptrdiff_t ph = (kh - 1) / 2, pw = (kw - 1) / 2;
    ConvGrads g{Tensor({h, w, cin}), Tensor({kh, kw, cin, cout}), Tensor({cout})};
    const double* X = x.data();
    const double* K = k.data();
    const double* GY = grad_out.data();

    for (std::size_t oy = 0; oy < h; ++oy)
        for (std::size_t ox = 0; ox < w; ++ox) {
            const double* gp = GY + (oy * w + ox) * cout;
            for (std::size_t o = 0; o < cout; ++o) g.grad_bias[o] += gp[o];
        }

    double* GK = g.grad_k.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ky = 0; ky < static_cast<std::ptrdiff_t>(kh); ++ky) {
        for (std::size_t oy = 0; oy < h; ++oy) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy) + ky - ph;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
            for (std::size_t kx = 0; kx < kw; ++kx) {
                const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - pw;
                const std::size_t ox0 = dx < 0 ? static_cast<std::size_t>(-dx) : 0;
                const std::size_t ox1 =
                    std::min<std::ptrdiff_t>(w, static_cast<std::ptrdiff_t>(w) - dx);
                if (cout == 1) {
                    double* kp = GK + (ky * kw + kx) * cin;
                    for (std::size_t ox = ox0; ox < ox1; ++ox) {
                        const std::size_t ix = ox + dx;
                        const double* xp = X + (iy * w + ix) * cin;
                        const double gv = GY[oy * w + ox];
                        for (std::size_t ci = 0; ci < cin; ++ci) kp[ci] += xp[ci] * gv;
                    }
                    continue;
                }
                for (std::size_t ox = ox0; ox < ox1; ++ox) {
                    const std::size_t ix = ox + dx;
                    const double* xp = X + (iy * w + ix) * cin;
                    const double* gp = GY + (oy * w + ox) * cout;
                    for (std::size_t ci = 0; ci < cin; ++ci) {
                        const double xv = xp[ci];
                        double* kp = GK + ((ky * kw + kx) * cin + ci) * cout;
                        for (std::size_t o = 0; o < cout; ++o) kp[o] += xv * gp[o];
                    }
                }
            }
        }
    }

    double* GX = g.grad_x.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t iy = 0; iy < static_cast<std::ptrdiff_t>(h); ++iy) {
        for (std::size_t ky = 0; ky < kh; ++ky) {
            const std::ptrdiff_t oy = iy - static_cast<std::ptrdiff_t>(ky) + ph;
            if (oy < 0 || oy >= static_cast<std::ptrdiff_t>(h)) continue;
            for (std::size_t kx = 0; kx < kw; ++kx) {
                const std::ptrdiff_t d = pw - static_cast<std::ptrdiff_t>(kx);
                const std::size_t ix0 = d < 0 ? static_cast<std::size_t>(-d) : 0;
                const std::size_t ix1 =
                    std::min<std::ptrdiff_t>(w, static_cast<std::ptrdiff_t>(w) - d);
                if (cout == 1) {
                    const double* kp = K + (ky * kw + kx) * cin;
                    for (std::size_t ix = ix0; ix < ix1; ++ix) {
                        const std::size_t ox = ix + d;
                        const double gv = GY[oy * w + ox];
                        double* xp = GX + (iy * w + ix) * cin;
                        for (std::size_t ci = 0; ci < cin; ++ci)
                            xp[ci] += kp[ci] * gv;
                    }
                    continue;
                }
                for (std::size_t ix = ix0; ix < ix1; ++ix) {
                    const std::size_t ox = ix + d;
                    const double* gp = GY + (oy * w + ox) * cout;
                    double* xp = GX + (iy * w + ix) * cin;
                    for (std::size_t ci = 0; ci < cin; ++ci) {
                        const double* kp = K + ((ky * kw + kx) * cin + ci) * cout;
                        double acc = 0.0;
                        for (std::size_t o = 0; o < cout; ++o) acc += kp[o] * gp[o];
                        xp[ci] += acc;
                    }
                }
            }
        }
    }
    return g;
}

Tensor conv2d_valid(const Tensor& x, const Tensor& k, const Tensor& bias,
                    std::size_t stride) {
    require_rank(x, 3, "conv2d_valid");
    require_rank(k, 4, "conv2d_valid");
    if (k.extent(2) != x.extent(2))
        throw std::invalid_argument("conv2d_valid: channel mismatch");
    if (stride == 0) throw std::invalid_argument("conv2d_valid: zero stride");
    const std::size_t h = x.extent(0), w = x.extent(1), cin = x.extent(2);
    const std::size_t kh = k.extent(0), kw = k.extent(1), cout = k.extent(3);
    if (h < kh || w < kw)
        throw std::invalid_argument("conv2d_valid: input smaller than kernel");
    const std::size_t oh = (h - kh) / stride + 1, ow = (w - kw) / stride + 1;
    Tensor y({oh, ow, cout});
    for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox) {
            double* yp = y.data() + (oy * ow + ox) * cout;
            for (std::size_t o = 0; o < cout; ++o) yp[o] = bias[o];
            for (std::size_t ky = 0; ky < kh; ++ky)
                for (std::size_t kx = 0; kx < kw; ++kx) {
                    const double* xp =
                        x.data() + ((oy * stride + ky) * w + ox * stride + kx) * cin;
                    for (std::size_t ci = 0; ci < cin; ++ci) {
                        const double xv = xp[ci];
                        const double* kp = k.data() + ((ky * kw + kx) * cin + ci) * cout;
                        for (std::size_t o = 0; o < cout; ++o) yp[o] += xv * kp[o];
                    }
                }
        }
    return y;
}

ConvGrads conv2d_valid_grads(const Tensor& x, const Tensor& k, const Tensor& grad_out,
                             std::size_t stride) {
    const std::size_t h = x.extent(0), w = x.extent(1), cin = x.extent(2);
    const std::size_t kh = k.extent(0), kw = k.extent(1), cout = k.extent(3);
    const std::size_t oh = (h - kh) / stride + 1, ow = (w - kw) / stride + 1;
    if (grad_out.rank() != 3 || grad_out.extent(0) != oh || grad_out.extent(1) != ow ||
        grad_out.extent(2) != cout)
        throw std::invalid_argument("conv2d_valid_grads: grad_out shape mismatch");
    ConvGrads g{Tensor({h, w, cin}), Tensor({kh, kw, cin, cout}), Tensor({cout})};
    for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox) {
            const double* gp = grad_out.data() + (oy * ow + ox) * cout;
            for (std::size_t o = 0; o < cout; ++o) g.grad_bias[o] += gp[o];
            for (std::size_t ky = 0; ky < kh; ++ky)
                for (std::size_t kx = 0; kx < kw; ++kx) {
                    const std::size_t iy = oy * stride + ky, ix = ox * stride + kx;
                    const double* xp = x.data() + (iy * w + ix) * cin;
                    double* gxp = g.grad_x.data() + (iy * w + ix) * cin;
                    for (std::size_t ci = 0; ci < cin; ++ci) {
                        double* kp = g.grad_k.data() + ((ky * kw + kx) * cin + ci) * cout;
                        const double* kv = k.data() + ((ky * kw + kx) * cin + ci) * cout;
                        double acc = 0.0;
                        for (std::size_t o = 0; o < cout; ++o) {
                            kp[o] += xp[ci] * gp[o];
                            acc += kv[o] * gp[o];
                        }
                        gxp[ci] += acc;
                    }
                }
        }
    return g;
}

Tensor relu(const Tensor& x) {
    Tensor y = x;
    for (std::size_t i = 0; i < y.numel(); ++i)
        if (y[i] < 0.0) y[i] = 0.0;
    return y;
}

Tensor relu_grad(const Tensor& x, const Tensor& grad_out) {
    require_same_shape(x, grad_out, "relu_grad");
    Tensor g = grad_out;
    for (std::size_t i = 0; i < g.numel(); ++i)
        if (x[i] <= 0.0) g[i] = 0.0;
    return g;
}

Tensor circular_convolve_direct(const Tensor& c, const Tensor& x) {
    if (c.rank() != 1 || x.rank() != 1 || c.numel() != x.numel())
        throw std::invalid_argument("circular_convolve_direct: length mismatch");
    const std::size_t n = c.numel();
    Tensor y({n});
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc += c[(i + n - j) % n] * x[j];
        y[i] = acc;
    }
    return y;
}

Tensor circular_convolve_fft(const Tensor& c, const Tensor& x) {
    if (c.rank() != 1 || x.rank() != 1 || c.numel() != x.numel())
        throw std::invalid_argument("circular_convolve_fft: length mismatch");
    const std::size_t n = c.numel();
    std::vector<std::complex<double>> cf(n), xf(n);
    for (std::size_t i = 0; i < n; ++i) {
        cf[i] = c[i];
        xf[i] = x[i];
    }
    auto C = dft(cf, false);
    auto X = dft(xf, false);
    for (std::size_t i = 0; i < n; ++i) C[i] *= X[i];
    auto Y = dft(C, true);
    Tensor y({n});
    for (std::size_t i = 0; i < n; ++i) y[i] = Y[i].real();
    return y;
}

double grad_check(const std::function<double(const Tensor&)>& fn,
                  const Tensor& params, const Tensor& analytic_grad, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("grad_check: eps <= 0");
    require_same_shape(params, analytic_grad, "grad_check");
    Tensor p = params;
    double max_rel = 0.0;
    for (std::size_t i = 0; i < p.numel(); ++i) {
        const double orig = p[i];
        p[i] = orig + eps;
        const double fp = fn(p);
        p[i] = orig - eps;
        const double fm = fn(p);
        p[i] = orig;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw std::runtime_error("grad_check: non-finite function value");
        const double num = (fp - fm) / (2.0 * eps);
        const double ana = analytic_grad[i];
        const double rel =
            std::abs(ana - num) / std::max({std::abs(ana), std::abs(num), 1e-8});
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

namespace ref {

Tensor matmul(const Tensor& a, const Tensor& b) {
    const std::size_t m = a.extent(0), kk = a.extent(1), p = b.extent(1);
    if (b.extent(0) != kk) throw std::invalid_argument("ref::matmul: shape mismatch");
    Tensor c({m, p});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < kk; ++t) acc += a.at(i, t) * b.at(t, j);
            c.at(i, j) = acc;
        }
    return c;
}

Tensor conv2d_same(const Tensor& x, const Tensor& k, const Tensor& bias) {
    check_conv_shapes(x, k, "ref::conv2d_same");
    const std::size_t h = x.extent(0), w = x.extent(1), cin = x.extent(2);
    const std::size_t kh = k.extent(0), kw = k.extent(1), cout = k.extent(3);
    const std::ptrdiff_t ph = (kh - 1) / 2, pw = (kw - 1) / 2;
    Tensor y({h, w, cout});
    for (std::size_t oy = 0; oy < h; ++oy)
        for (std::size_t ox = 0; ox < w; ++ox)
            for (std::size_t o = 0; o < cout; ++o) {
                double acc = bias[o];
                for (std::size_t ky = 0; ky < kh; ++ky)
                    for (std::size_t kx = 0; kx < kw; ++kx) {
                        const std::ptrdiff_t iy = oy + ky - ph, ix = ox + kx - pw;
                        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h) || ix < 0 ||
                            ix >= static_cast<std::ptrdiff_t>(w))
                            continue;
                        for (std::size_t ci = 0; ci < cin; ++ci)
                            acc += x.at(iy, ix, ci) * k.at(ky, kx, ci, o);
                    }
                y.at(oy, ox, o) = acc;
            }
    return y;
}

ConvGrads conv2d_same_grads(const Tensor& x, const Tensor& k, const Tensor& grad_out) {
    const std::size_t h = x.extent(0), w = x.extent(1), cin = x.extent(2);
    const std::size_t kh = k.extent(0), kw = k.extent(1), cout = k.extent(3);
    const std::ptrdiff_t ph = (kh - 1) / 2, pw = (kw - 1) / 2;
    ConvGrads g{Tensor({h, w, cin}), Tensor({kh, kw, cin, cout}), Tensor({cout})};
    for (std::size_t oy = 0; oy < h; ++oy)
        for (std::size_t ox = 0; ox < w; ++ox)
            for (std::size_t o = 0; o < cout; ++o) {
                const double gv = grad_out.at(oy, ox, o);
                g.grad_bias[o] += gv;
                for (std::size_t ky = 0; ky < kh; ++ky)
                    for (std::size_t kx = 0; kx < kw; ++kx) {
                        const std::ptrdiff_t iy = oy + ky - ph, ix = ox + kx - pw;
                        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h) || ix < 0 ||
                            ix >= static_cast<std::ptrdiff_t>(w))
                            continue;
                        for (std::size_t ci = 0; ci < cin; ++ci) {
                            g.grad_k.at(ky, kx, ci, o) += x.at(iy, ix, ci) * gv;
                            g.grad_x.at(iy, ix, ci) += k.at(ky, kx, ci, o) * gv;
                        }
                    }
            }
    return g;
}

}  // namespace ref

}  // namespace rcn
