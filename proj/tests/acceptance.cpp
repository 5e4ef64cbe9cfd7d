// Acceptance gate: one pass/fail line per criterion, non-zero exit if
// any criterion fails. Desk-scale training runs share one trained model
// to keep the total runtime bounded.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rcn/evalkit.hpp"
#include "rcn/kernels.hpp"
#include "rcn/training.hpp"

using namespace rcn;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Smooth synthetic image: a sum of random sinusoids, normalized into
// [0,1]. The defaults give a low-frequency family that is easy to learn
// from; higher wave counts and frequencies give a richer family whose
// intrinsic dimension exceeds small measurement budgets.
GrayImage synth_image(std::size_t side, std::uint64_t seed, int nwaves = 12,
                      double fmin = 0.02, double fmax = 0.14) {
    Prng rng(seed);
    struct Wave {
        double fx, fy, phase, amp;
    };
    std::vector<Wave> waves;
    for (int i = 0; i < nwaves; ++i)
        waves.push_back(Wave{fmin + (fmax - fmin) * rng.next_double(),
                             fmin + (fmax - fmin) * rng.next_double(),
                             6.283185307179586 * rng.next_double(),
                             0.3 + 0.7 * rng.next_double()});
    GrayImage img;
    img.height = img.width = side;
    img.pixels.resize(side * side);
    double lo = 1e300, hi = -1e300;
    for (std::size_t y = 0; y < side; ++y)
        for (std::size_t x = 0; x < side; ++x) {
            double v = 0.0;
            for (const Wave& w : waves)
                v += w.amp * std::sin(w.fx * static_cast<double>(x) +
                                      w.fy * static_cast<double>(y) + w.phase);
            img.at(y, x) = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const double span = hi > lo ? hi - lo : 1.0;
    for (double& p : img.pixels) p = (p - lo) / span;
    return img;
}

double mean_window(const std::vector<double>& v, std::size_t begin, std::size_t count) {
    double s = 0.0;
    for (std::size_t i = begin; i < begin + count; ++i) s += v[i];
    return s / static_cast<double>(count);
}

// Linear decoding baseline: per block xhat = phi^T y, stitched.
GrayImage linear_decode(const MeasurementMatrix& phi, const GrayImage& img) {
    auto [blocks, geom] = tile_blocks(img);
    std::vector<Tensor> recon;
    for (const Tensor& b : blocks) {
        Tensor y = sense(phi, b.reshaped({kBlockPixels}));
        Tensor xhat({kBlockPixels});
        for (std::size_t j = 0; j < kBlockPixels; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < phi.m; ++i) acc += phi.phi.at(i, j) * y[i];
            xhat[j] = acc;
        }
        recon.push_back(xhat.reshaped({kBlockSide, kBlockSide}));
    }
    return stitch_blocks(recon, geom);
}

double mean_patch_psnr(const std::vector<Tensor>& preds,
                       const std::vector<Tensor>& targets) {
    double acc = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        double mse = 0.0;
        for (std::size_t j = 0; j < kBlockPixels; ++j) {
            const double p = std::clamp(preds[i][j], 0.0, 1.0);
            const double d = p - targets[i][j];
            mse += d * d;
        }
        mse /= static_cast<double>(kBlockPixels);
        acc += 10.0 * std::log10(1.0 / std::max(mse, 1e-12));
    }
    return acc / static_cast<double>(preds.size());
}

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

// Shared state produced by the desk-scale training criterion.
struct Shared {
    MeasurementMatrix phi25;
    ReconNetModel model25;
    GrayImage held_a, held_b;
    PatchDataset dataset;
    bool trained = false;
};

bool report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", id, name,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    return ok;
}

// ---------------------------------------------------------------------
// 1. Gradient integrity
// ---------------------------------------------------------------------
bool criterion_gradients(std::string& detail) {
    Prng rng(101);
    double worst = 0.0;
    std::string worst_at = "none";
    auto track_named = [&](double e, const char* where) {
        if (e > worst) {
            worst = e;
            worst_at = where;
        }
    };
    auto track = [&](double e) { track_named(e, "layer"); };

    {  // FC layer
        FcLayer fc(7, 5);
        gaussian_fill(fc.W, 0.0, 0.5, rng);
        gaussian_fill(fc.b, 0.0, 0.5, rng);
        Tensor x({5}), w({7});
        gaussian_fill(x, 0.0, 1.0, rng);
        gaussian_fill(w, 0.0, 1.0, rng);
        auto fn = [&](const Tensor& W) {
            FcLayer f = fc;
            f.W = W;
            Tensor y = f.forward(x);
            double s = 0.0;
            for (std::size_t i = 0; i < 7; ++i) s += w[i] * y[i];
            return s;
        };
        FcLayer::Grads g = fc.backward(x, w);
        track(grad_check(fn, fc.W, g.grad_W, 1e-6));
        auto fnx = [&](const Tensor& xi) {
            Tensor y = fc.forward(xi);
            double s = 0.0;
            for (std::size_t i = 0; i < 7; ++i) s += w[i] * y[i];
            return s;
        };
        track(grad_check(fnx, x, g.grad_x, 1e-6));
    }

    for (std::size_t ks : {std::size_t{11}, std::size_t{1}, std::size_t{7}}) {
        Tensor x({15, 15, 2}), k({ks, ks, 2, 3}), bias({3});
        gaussian_fill(x, 0.0, 1.0, rng);
        gaussian_fill(k, 0.0, 0.3, rng);
        gaussian_fill(bias, 0.0, 0.3, rng);
        Tensor w({15, 15, 3});
        gaussian_fill(w, 0.0, 1.0, rng);
        auto fn = [&](const Tensor& kk) {
            Tensor y = conv2d_same(x, kk, bias);
            double s = 0.0;
            for (std::size_t i = 0; i < y.numel(); ++i) s += w[i] * y[i];
            return s;
        };
        ConvGrads g = conv2d_same_grads(x, k, w);
        track(grad_check(fn, k, g.grad_k, 1e-6));
        auto fnx = [&](const Tensor& xx) {
            Tensor y = conv2d_same(xx, k, bias);
            double s = 0.0;
            for (std::size_t i = 0; i < y.numel(); ++i) s += w[i] * y[i];
            return s;
        };
        track(grad_check(fnx, x, g.grad_x, 1e-6));
    }

    {  // ReLU away from kinks
        Tensor x({40});
        for (std::size_t i = 0; i < 40; ++i) {
            double v;
            do {
                v = 2.0 * rng.next_double() - 1.0;
            } while (std::abs(v) < 0.1);
            x[i] = v;
        }
        Tensor w({40});
        gaussian_fill(w, 0.0, 1.0, rng);
        auto fn = [&](const Tensor& xx) {
            Tensor y = relu(xx);
            double s = 0.0;
            for (std::size_t i = 0; i < 40; ++i) s += w[i] * y[i];
            return s;
        };
        track(grad_check(fn, x, relu_grad(x, w), 1e-6));
    }

    {  // circulant layer
        CirculantLayer layer(33, 12);
        gaussian_fill(layer.c, 0.0, 0.5, rng);
        Tensor x({12}), w({33});
        gaussian_fill(x, 0.0, 1.0, rng);
        gaussian_fill(w, 0.0, 1.0, rng);
        CirculantLayer::Grads g = layer.backward(x, w);
        auto fnc = [&](const Tensor& c) {
            CirculantLayer l = layer;
            l.c = c;
            Tensor y = l.forward(x);
            double s = 0.0;
            for (std::size_t i = 0; i < 33; ++i) s += w[i] * y[i];
            return s;
        };
        track(grad_check(fnc, layer.c, g.grad_c, 1e-6));
        auto fnx = [&](const Tensor& xx) {
            Tensor y = layer.forward(xx);
            double s = 0.0;
            for (std::size_t i = 0; i < 33; ++i) s += w[i] * y[i];
            return s;
        };
        track(grad_check(fnx, x, g.grad_x, 1e-6));
    }

    {  // sigmoid
        Tensor x({1}, {0.37});
        auto fn = [&](const Tensor& xx) { return sigmoid(xx[0]); };
        Tensor g({1});
        g[0] = sigmoid_grad_from_output(sigmoid(x[0]), 1.0);
        track(grad_check(fn, x, g, 1e-6));
    }

    {  // dropout (train mode, fixed mask)
        Dropout drop{0.5};
        Prng mrng(102);
        Tensor mask = drop.make_mask({30}, Mode::Train, mrng);
        Tensor x({30}), w({30});
        gaussian_fill(x, 0.0, 1.0, rng);
        gaussian_fill(w, 0.0, 1.0, rng);
        auto fn = [&](const Tensor& xx) {
            Tensor y = Dropout::apply(xx, mask);
            double s = 0.0;
            for (std::size_t i = 0; i < 30; ++i) s += w[i] * y[i];
            return s;
        };
        Tensor g = Dropout::apply(w, mask);  // backward through the same mask
        track(grad_check(fn, x, g, 1e-6));
    }

    {  // Euclidean loss
        Tensor pred({2, 6}), target({2, 6});
        gaussian_fill(pred, 0.0, 1.0, rng);
        gaussian_fill(target, 0.0, 1.0, rng);
        LossValue lv = euclidean_loss(pred, target);
        auto fn = [&](const Tensor& p) { return euclidean_loss(p, target).value; };
        track(grad_check(fn, pred, lv.grad, 1e-6));
    }

    {  // BCE at interior probabilities
        for (double p0 : {0.21, 0.5, 0.83}) {
            Tensor p({1}, {p0});
            for (int label : {0, 1}) {
                LossValue lv = bce_loss(p[0], label);
                auto fn = [&](const Tensor& pp) { return bce_loss(pp[0], label).value; };
                track(grad_check(fn, p, lv.grad, 1e-7));
            }
        }
    }

    {  // full composed ReconNet Euclidean loss, random parameter subsample.
        // Weights are rescaled and biases shifted positive so every ReLU
        // pre-activation sits well away from its kink; the criterion is a
        // non-kink-point check and eps-perturbations must not flip units.
        Prng mr(103);
        ReconNetSpec spec;
        spec.mr = 0.25;
        spec.n_units = 2;
        ReconNetModel model = build_reconnet(spec, FcInit{}, mr);
        gaussian_fill(model.fc.W, 0.0, 0.05, mr);
        gaussian_fill(model.fc.b, 0.1, 0.02, mr);
        for (auto& conv : model.convs) {
            const double fan_in = static_cast<double>(conv.k.numel() /
                                                      conv.k.extent(3));
            gaussian_fill(conv.k, 0.0, 0.5 / std::sqrt(fan_in), mr);
            gaussian_fill(conv.b, 0.4, 0.05, mr);
        }
        Tensor target({kBlockPixels});
        for (std::size_t i = 0; i < kBlockPixels; ++i) target[i] = mr.next_double();

        // choose an input whose ReLU pre-activations all clear the kink
        // by more than any eps-perturbation can move them
        Tensor y({model.m});
        double clearance = 0.0;
        for (int attempt = 0; attempt < 64 && clearance < 5e-5; ++attempt) {
            gaussian_fill(y, 0.0, 1.0, mr);
            ReconNetModel::Cache probe_cache;
            model.forward(y, probe_cache);
            clearance = 1e300;
            for (const Tensor& pre : probe_cache.pre)
                for (std::size_t i = 0; i < pre.numel(); ++i)
                    clearance = std::min(clearance, std::abs(pre[i]));
        }

        auto loss_of = [&]() {
            Tensor pred = model.forward(y);
            double s = 0.0;
            for (std::size_t i = 0; i < kBlockPixels; ++i) {
                const double d = pred[i] - target[i];
                s += d * d;
            }
            return s;
        };
        ReconNetModel::Cache cache;
        Tensor pred = model.forward(y, cache);
        Tensor gout({kBlockSide, kBlockSide});
        for (std::size_t i = 0; i < kBlockPixels; ++i)
            gout[i] = 2.0 * (pred[i] - target[i]);
        ReconNetModel::Grads grads = model.backward(cache, gout);
        auto params = model.named_params();
        std::vector<Tensor*> grefs = model.grad_refs(grads);

        const double eps = 1e-6;
        for (int probe = 0; probe < 40; ++probe) {
            const std::size_t li = mr.next_below(params.size());
            Tensor* p = params[li].second;
            const std::size_t j = mr.next_below(p->numel());
            const double orig = (*p)[j];
            (*p)[j] = orig + eps;
            const double lp = loss_of();
            (*p)[j] = orig - eps;
            const double lm = loss_of();
            (*p)[j] = orig;
            const double fd = (lp - lm) / (2.0 * eps);
            const double an = (*grefs[li])[j];
            track_named(std::abs(an - fd) /
                            std::max({std::abs(an), std::abs(fd), 1e-3}),
                        "composed model");
        }
    }

    std::ostringstream os;
    os << "max relative error " << worst << " (" << worst_at << ")";
    detail = os.str();
    return worst < 1e-4;
}

// ---------------------------------------------------------------------
// 2. Circulant equivalence
// ---------------------------------------------------------------------
bool criterion_circulant(std::string& detail) {
    Prng rng(201);
    double worst = 0.0;
    for (std::size_t n : {std::size_t{1}, std::size_t{8}, std::size_t{33},
                          std::size_t{1089}}) {
        Tensor c({n}), x({n});
        gaussian_fill(c, 0.0, 1.0, rng);
        gaussian_fill(x, 0.0, 1.0, rng);
        Tensor d = circular_convolve_direct(c, x);
        Tensor f = circular_convolve_fft(c, x);
        CirculantLayer layer(n, n);
        layer.c = c;
        Tensor dense = layer.dense_matrix();
        Tensor viadense = matvec(dense, x);
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(d[i] - f[i]));
            worst = std::max(worst, std::abs(d[i] - viadense[i]));
        }
    }

    // circulant layer forward == equivalent FC on the zero-padded input
    CirculantLayer layer(33, 12);
    gaussian_fill(layer.c, 0.0, 1.0, rng);
    Tensor x({12});
    gaussian_fill(x, 0.0, 1.0, rng);
    Tensor y = layer.forward(x);
    Tensor dense = layer.dense_matrix();
    Tensor padded({33});
    for (std::size_t i = 0; i < 12; ++i) padded[i] = x[i];
    FcLayer fc(33, 33);
    fc.W = dense;
    fc.b.zero();
    Tensor yfc = fc.forward(padded);
    for (std::size_t i = 0; i < 33; ++i)
        worst = std::max(worst, std::abs(y[i] - yfc[i]));

    std::ostringstream os;
    os << "max deviation " << worst;
    detail = os.str();
    return worst < 1e-9;
}

// ---------------------------------------------------------------------
// 3. Published arithmetic
// ---------------------------------------------------------------------
bool criterion_arithmetic(std::string& detail) {
    bool ok = true;
    Prng rng(301);
    ReconNetSpec spec;
    spec.mr = 0.10;
    spec.n_units = 2;
    ReconNetModel model = build_reconnet(spec, FcInit{}, rng);
    std::size_t conv_w = 0;
    for (const auto& c : model.convs) conv_w += c.k.numel();
    ok &= conv_w == 22720;
    ok &= model.fc.W.numel() == 118701;

    ok &= mr_to_m(0.25, 1089) == 272;
    ok &= mr_to_m(0.10, 1089) == 109;
    ok &= mr_to_m(0.04, 1089) == 43;
    ok &= mr_to_m(0.01, 1089) == 10;

    struct Row {
        double mr;
        int gamma;
        double pct;
    };
    const Row rows[] = {{0.25, 1, 99.63}, {0.25, 13, 95.22}, {0.10, 1, 99.08},
                        {0.10, 5, 95.41}, {0.04, 1, 97.67},  {0.04, 2, 95.34},
                        {0.01, 1, 90.00}};
    double worst_pp = 0.0;
    for (const Row& r : rows) {
        const auto m = mr_to_m(r.mr, 1089);
        const double pct = 100.0 * (1.0 - static_cast<double>(r.gamma) * 1089.0 /
                                              (static_cast<double>(m) * 1089.0));
        worst_pp = std::max(worst_pp, std::abs(pct - r.pct));
    }
    ok &= worst_pp < 0.01;
    std::ostringstream os;
    os << "conv weights " << conv_w << ", fc weights " << model.fc.W.numel()
       << ", worst table deviation " << worst_pp << " pp";
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------------
// 4. Sensing invariants
// ---------------------------------------------------------------------
bool criterion_sensing(std::string& detail) {
    MeasurementMatrix phi = gen_gaussian_orthonormal(1089, 0.25, 401);
    double gram_err = 0.0;
    for (std::size_t i = 0; i < phi.m; ++i)
        for (std::size_t j = i; j < phi.m; ++j) {
            double dot = 0.0;
            for (std::size_t t = 0; t < phi.n; ++t)
                dot += phi.phi.at(i, t) * phi.phi.at(j, t);
            gram_err = std::max(gram_err, std::abs(dot - (i == j ? 1.0 : 0.0)));
        }

    Prng rng(402);
    Tensor x1({1089}), x2({1089});
    gaussian_fill(x1, 0.0, 1.0, rng);
    gaussian_fill(x2, 0.0, 1.0, rng);
    Tensor mix({1089});
    for (std::size_t i = 0; i < 1089; ++i) mix[i] = 0.6 * x1[i] - 1.7 * x2[i];
    Tensor lhs = sense(phi, mix);
    Tensor y1 = sense(phi, x1), y2 = sense(phi, x2);
    double lin_err = 0.0;
    for (std::size_t i = 0; i < lhs.numel(); ++i)
        lin_err = std::max(lin_err, std::abs(lhs[i] - (0.6 * y1[i] - 1.7 * y2[i])));

    MeasurementMatrix q = quantize_matrix(phi, 8);
    const auto [lo, hi] =
        std::minmax_element(phi.phi.vec().begin(), phi.phi.vec().end());
    const double step = (*hi - *lo) / 255.0;
    double q_err = 0.0;
    for (std::size_t i = 0; i < phi.phi.numel(); ++i)
        q_err = std::max(q_err, std::abs(q.phi[i] - phi.phi[i]));

    const bool ok = gram_err < 1e-10 && lin_err < 1e-12 && q_err <= step / 2 + 1e-15;
    std::ostringstream os;
    os << "gram " << gram_err << ", linearity " << lin_err << ", quant " << q_err
       << " (step/2 " << step / 2 << ")";
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------------
// 5. Desk-scale Euclidean training
// ---------------------------------------------------------------------
bool criterion_training(Shared& sh, std::string& detail) {
    const double t0 = now_seconds();

    for (std::uint64_t i = 0; i < 8; ++i) {
        GrayImage img = synth_image(256, 500 + i);
        append(sh.dataset, extract_patches(img, "train" + std::to_string(i)));
    }
    sh.held_a = synth_image(256, 600);
    sh.held_b = synth_image(256, 601);

    sh.phi25 = gen_gaussian_orthonormal(kBlockPixels, 0.25, 510);
    Prng rng(511);
    ReconNetSpec spec;
    spec.mr = 0.25;
    spec.n_units = 2;
    FcInit init;
    init.kind = FcInit::FromPhiTranspose;
    init.phi = &sh.phi25;
    sh.model25 = build_reconnet(spec, init, rng);

    auto train = make_training_pairs(sh.dataset, sh.phi25, Split::Train);
    TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.iterations = 10000;
    cfg.optimizer = OptKind::Adam;
    cfg.learning_rate = 1e-3;
    cfg.seed = 512;
    auto history = train_euclidean(sh.model25, train, cfg);
    sh.trained = true;

    const double early = mean_window(history, 100, 100);
    const double late = mean_window(history, history.size() - 100, 100);

    auto [recon, secs] =
        reconstruct_image(sh.model25, sh.phi25, sh.held_a, NoiseSpec{0.0}, 513);
    const double psnr_net = psnr(sh.held_a, recon);
    const double psnr_lin = psnr(sh.held_a, linear_decode(sh.phi25, sh.held_a));

    const double elapsed = now_seconds() - t0;
    const bool ok = late <= 0.5 * early && psnr_net >= psnr_lin + 1.0 &&
                    elapsed <= 1800.0;
    std::ostringstream os;
    os << train.size() << " patches, loss " << early << " @it100 -> " << late
       << " final, psnr net " << psnr_net << " dB vs linear " << psnr_lin
       << " dB, " << elapsed << " s";
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------------
// 6. Learned-measurement direction at MR 0.04
// ---------------------------------------------------------------------
bool criterion_learned_phi(const Shared& sh, std::string& detail) {
    (void)sh;
    const std::size_t m = mr_to_m(0.04, kBlockPixels);

    // This comparison needs a corpus whose intrinsic dimension exceeds
    // the 43-coefficient budget; the shared low-frequency corpus is
    // fully captured by a random Gaussian matrix already, leaving no
    // headroom for a learned one. Use a richer sinusoid family.
    PatchDataset dataset;
    for (std::uint64_t i = 0; i < 8; ++i)
        append(dataset, extract_patches(synth_image(256, 620 + i, 16, 0.05, 0.60),
                                        "c6train" + std::to_string(i)));
    GrayImage held = synth_image(256, 640, 16, 0.05, 0.60);
    auto ae_pairs = make_autoencoder_pairs(dataset, Split::Train);

    TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.iterations = 2500;
    cfg.optimizer = OptKind::Adam;
    cfg.learning_rate = 1e-3;
    cfg.seed = 610;

    // Both runs start from the same Gaussian orthonormal matrix and the
    // same decoder weights; the learned run additionally adapts the
    // measurement rows while the baseline keeps them frozen.
    MeasurementMatrix phi_gauss = gen_gaussian_orthonormal(kBlockPixels, 0.04, 612);

    Prng rng_a(611);
    ReconNetSpec spec;
    spec.mr = 0.04;
    spec.n_units = 1;
    ReconNetModel dec_learned = build_reconnet(spec, FcInit{}, rng_a);
    Encoder enc = build_encoder(m, rng_a);
    enc.W = phi_gauss.phi;
    train_autoencoder(enc, dec_learned, ae_pairs, cfg);
    MeasurementMatrix phi_learned = enc.export_phi(0.04);

    Prng rng_b(611);
    ReconNetModel dec_gauss = build_reconnet(spec, FcInit{}, rng_b);
    auto pairs_gauss = make_training_pairs(dataset, phi_gauss, Split::Train);
    train_euclidean(dec_gauss, pairs_gauss, cfg);

    // held-out patch PSNR
    auto held_patches = extract_patches(held, "held");
    std::vector<Tensor> targets, pred_l, pred_g;
    for (const Patch& p : held_patches.patches) {
        Tensor x = p.t.reshaped({kBlockPixels});
        targets.push_back(x);
        pred_l.push_back(
            dec_learned.forward(sense(phi_learned, x)).reshaped({kBlockPixels}));
        pred_g.push_back(
            dec_gauss.forward(sense(phi_gauss, x)).reshaped({kBlockPixels}));
    }
    const double psnr_l = mean_patch_psnr(pred_l, targets);
    const double psnr_g = mean_patch_psnr(pred_g, targets);
    const bool ok = psnr_l >= psnr_g + 0.5;
    std::ostringstream os;
    os << "learned " << psnr_l << " dB vs gaussian " << psnr_g << " dB";
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------------
// 7. Adversarial training mechanics
// ---------------------------------------------------------------------
bool criterion_adversarial(const Shared& sh, std::string& detail) {
    auto train = make_training_pairs(sh.dataset, sh.phi25, Split::Train);

    // bitwise lambda_adv = 0 equivalence on the opening G updates
    GanConfig zcfg;
    zcfg.lambda_adv = 0.0;
    zcfg.iterations = 1;
    zcfg.batch_size = 4;
    zcfg.lr_g = 1e-3;
    zcfg.seed = 710;
    Prng g1(711), d1(712);
    ReconNetSpec spec;
    spec.mr = 0.25;
    spec.n_units = 1;
    ReconNetModel gen_z = build_reconnet(spec, FcInit{}, g1);
    Discriminator disc_z = build_discriminator(d1);
    train_adversarial(gen_z, disc_z, train, zcfg);

    TrainConfig ecfg;
    ecfg.batch_size = 4;
    ecfg.iterations = 2;
    ecfg.optimizer = OptKind::Adam;
    ecfg.learning_rate = 1e-3;
    ecfg.seed = 710;
    Prng g2(711);
    ReconNetModel gen_e = build_reconnet(spec, FcInit{}, g2);
    train_euclidean(gen_e, train, ecfg);
    bool bitwise = true;
    auto pa = gen_z.named_params();
    auto pb = gen_e.named_params();
    for (std::size_t i = 0; i < pa.size() && bitwise; ++i)
        for (std::size_t j = 0; j < pa[i].second->numel(); ++j)
            if ((*pa[i].second)[j] != (*pb[i].second)[j]) {
                bitwise = false;
                break;
            }

    // desk-scale run with the paper hyperparameters
    GanConfig cfg;
    cfg.iterations = 2000;
    cfg.batch_size = 4;
    cfg.seed = 713;
    Prng g3(714), d3(715);
    ReconNetModel gen = build_reconnet(spec, FcInit{}, g3);
    Discriminator disc = build_discriminator(d3);
    GanHistory h = train_adversarial(gen, disc, train, cfg);

    const bool counters = h.g_updates == 4000 && h.d_updates == 2000;
    double pr = 0.0, pf = 0.0;
    const std::size_t tail = 200;
    for (std::size_t i = h.d_prob_real.size() - tail; i < h.d_prob_real.size(); ++i) {
        pr += h.d_prob_real[i] / static_cast<double>(tail);
        pf += h.d_prob_fake[i] / static_cast<double>(tail);
    }
    const bool band = pr >= 0.3 && pr <= 0.7 && pf >= 0.3 && pf <= 0.7;

    const bool ok = bitwise && counters && band;
    std::ostringstream os;
    os << "lambda_adv=0 bitwise " << (bitwise ? "yes" : "NO") << ", updates "
       << h.g_updates << ":" << h.d_updates << ", tail D probs real " << pr
       << " fake " << pf;
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------------
// 8. FC-only fine-tuning across rates
// ---------------------------------------------------------------------
bool criterion_finetune(const Shared& sh, std::string& detail) {
    MeasurementMatrix phi10 = gen_gaussian_orthonormal(kBlockPixels, 0.10, 810);
    auto train = make_training_pairs(sh.dataset, phi10, Split::Train);
    TrainConfig cfg;
    // The FC restarts from random weights, so each of the 1000
    // iterations needs a batch large enough to relearn it; batch 4 is
    // too few samples in total.
    cfg.batch_size = 16;
    cfg.iterations = 1000;
    cfg.optimizer = OptKind::Adam;
    cfg.learning_rate = 1e-3;
    cfg.seed = 811;
    ReconNetModel tuned = finetune_fc(sh.model25, phi10, train, cfg);

    bool frozen = true;
    for (std::size_t i = 0; i < tuned.convs.size(); ++i) {
        for (std::size_t j = 0; j < tuned.convs[i].k.numel(); ++j)
            if (tuned.convs[i].k[j] != sh.model25.convs[i].k[j]) frozen = false;
        for (std::size_t j = 0; j < tuned.convs[i].b.numel(); ++j)
            if (tuned.convs[i].b[j] != sh.model25.convs[i].b[j]) frozen = false;
    }

    auto [recon_t, st] =
        reconstruct_image(tuned, phi10, sh.held_a, NoiseSpec{0.0}, 812);
    const double psnr_tuned = psnr(sh.held_a, recon_t);

    // base model fed the same measurements, zero-padded to its input width
    auto [blocks, geom] = tile_blocks(sh.held_a);
    std::vector<Tensor> recon_base;
    for (const Tensor& b : blocks) {
        Tensor y = sense(phi10, b.reshaped({kBlockPixels}));
        Tensor padded({sh.model25.m});
        for (std::size_t i = 0; i < y.numel(); ++i) padded[i] = y[i];
        recon_base.push_back(sh.model25.forward(padded));
    }
    const double psnr_base = psnr(sh.held_a, stitch_blocks(recon_base, geom));

    const bool ok = frozen && psnr_tuned >= psnr_base + 1.0;
    std::ostringstream os;
    os << "convs frozen " << (frozen ? "yes" : "NO") << ", tuned " << psnr_tuned
       << " dB vs base-on-new-measurements " << psnr_base << " dB";
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------------
// 9. Noise robustness trend
// ---------------------------------------------------------------------
bool criterion_noise_trend(const Shared& sh, std::string& detail) {
    const std::vector<double> sigmas{0.0, 10.0, 20.0, 30.0};
    std::vector<double> means;
    for (double s : sigmas) {
        double acc = 0.0;
        int k = 0;
        for (const GrayImage* img : {&sh.held_a, &sh.held_b}) {
            auto [recon, secs] = reconstruct_image(
                sh.model25, sh.phi25, *img, NoiseSpec{s},
                910 + static_cast<std::uint64_t>(10 * s) + static_cast<std::uint64_t>(k));
            acc += psnr(*img, recon);
            ++k;
        }
        means.push_back(acc / 2.0);
    }
    bool ok = true;
    for (std::size_t i = 1; i < means.size(); ++i)
        if (means[i] > means[i - 1] + 0.5) ok = false;
    std::ostringstream os;
    os << "mean psnr by sigma:";
    for (std::size_t i = 0; i < means.size(); ++i)
        os << " " << sigmas[i] << "->" << means[i] << "dB";
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------------
// 10. Non-iterative speed and linear scaling
// ---------------------------------------------------------------------
bool criterion_speed(const Shared& sh, std::string& detail) {
    const double t256 = bench(sh.model25, sh.phi25, 256, 3);

    std::vector<double> xs, ys;
    for (std::size_t side : {std::size_t{66}, std::size_t{132}, std::size_t{264}}) {
        const double blocks =
            static_cast<double>((side / 33) * (side / 33));
        xs.push_back(blocks);
        ys.push_back(bench(sh.model25, sh.phi25, side, 3));
    }
    const std::size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    const double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
    const double inter = (sy - slope * sx) / static_cast<double>(n);
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double fit = inter + slope * xs[i];
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    const double r2 = 1.0 - ss_res / ss_tot;

    const bool ok = t256 <= 2.0 && r2 > 0.95;
    std::ostringstream os;
    os << "256x256 in " << t256 << " s, scaling R^2 " << r2;
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------------
// 11. End-to-end determinism
// ---------------------------------------------------------------------
bool criterion_determinism(const Shared& sh, std::string& detail) {
    auto run_once = [&](const std::string& ck_path, const std::string& img_path) {
        MeasurementMatrix phi = gen_gaussian_orthonormal(kBlockPixels, 0.01, 1101);
        Prng rng(1102);
        ReconNetSpec spec;
        spec.mr = 0.01;
        spec.n_units = 1;
        ReconNetModel model = build_reconnet(spec, FcInit{}, rng);
        auto train = make_training_pairs(sh.dataset, phi, Split::Train);
        train.resize(64);
        TrainConfig cfg;
        cfg.batch_size = 4;
        cfg.iterations = 30;
        cfg.optimizer = OptKind::Adam;
        cfg.learning_rate = 1e-3;
        cfg.seed = 1103;
        train_euclidean(model, train, cfg);
        save_model(model, phi, ck_path);

        auto [loaded, lphi] = load_model(ck_path);
        auto [recon, secs] =
            reconstruct_image(loaded, lphi, sh.held_b, NoiseSpec{10.0}, 1104);
        write_pgm(recon, img_path);
    };
    run_once("det_a.ckpt", "det_a.pgm");
    run_once("det_b.ckpt", "det_b.pgm");
    const bool ck_same = file_bytes("det_a.ckpt") == file_bytes("det_b.ckpt");
    const bool img_same = file_bytes("det_a.pgm") == file_bytes("det_b.pgm");
    std::remove("det_a.ckpt");
    std::remove("det_b.ckpt");
    std::remove("det_a.pgm");
    std::remove("det_b.pgm");
    std::ostringstream os;
    os << "checkpoint bytes " << (ck_same ? "identical" : "DIFFER") << ", image bytes "
       << (img_same ? "identical" : "DIFFER");
    detail = os.str();
    return ck_same && img_same;
}

}  // namespace

int main() {
    Shared sh;
    int failures = 0;
    std::string d;

    if (!report(1, "gradient integrity", criterion_gradients(d), d)) ++failures;
    if (!report(2, "circulant equivalence", criterion_circulant(d), d)) ++failures;
    if (!report(3, "published arithmetic", criterion_arithmetic(d), d)) ++failures;
    if (!report(4, "sensing invariants", criterion_sensing(d), d)) ++failures;
    if (!report(5, "desk-scale training", criterion_training(sh, d), d)) ++failures;
    if (!sh.trained) {
        std::printf("aborting: later criteria depend on the trained model\n");
        return 1;
    }
    if (!report(6, "learned measurement direction", criterion_learned_phi(sh, d), d))
        ++failures;
    if (!report(7, "adversarial mechanics", criterion_adversarial(sh, d), d))
        ++failures;
    if (!report(8, "fc fine-tuning", criterion_finetune(sh, d), d)) ++failures;
    if (!report(9, "noise robustness trend", criterion_noise_trend(sh, d), d))
        ++failures;
    if (!report(10, "reconstruction speed", criterion_speed(sh, d), d)) ++failures;
    if (!report(11, "end-to-end determinism", criterion_determinism(sh, d), d))
        ++failures;

    if (failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
