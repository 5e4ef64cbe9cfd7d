#include "rcn/training.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "rcn/kernels.hpp"

namespace rcn {

namespace {

// Epoch-shuffled index stream; reshuffles with its own generator when a
// pass over the data completes.
class BatchSampler {
public:
    BatchSampler(std::size_t n, std::uint64_t seed) : rng_(seed), order_(n) {
        if (n == 0) throw std::invalid_argument("BatchSampler: empty dataset");
        for (std::size_t i = 0; i < n; ++i) order_[i] = i;
        shuffle();
    }

    std::vector<std::size_t> next(std::size_t batch) {
        std::vector<std::size_t> out;
        out.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i) {
            if (pos_ == order_.size()) {
                shuffle();
                pos_ = 0;
            }
            out.push_back(order_[pos_++]);
        }
        return out;
    }

private:
    void shuffle() {
        for (std::size_t i = order_.size(); i > 1; --i)
            std::swap(order_[i - 1], order_[rng_.next_below(i)]);
    }

    Prng rng_;
    std::vector<std::size_t> order_;
    std::size_t pos_ = 0;
};

void check_cfg(const TrainConfig& cfg) {
    if (cfg.batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size < 1");
    if (!(cfg.learning_rate > 0.0) && cfg.learning_rate != 0.0)
        throw std::invalid_argument("TrainConfig: bad learning rate");
}

void apply_step(const TrainConfig& cfg, const std::vector<Tensor*>& params,
                const std::vector<Tensor*>& grads, OptimizerState& state) {
    if (cfg.optimizer == OptKind::Sgd)
        sgd_step(params, grads, cfg.learning_rate, cfg.momentum, state);
    else
        adam_step(params, grads, state, cfg.learning_rate, cfg.beta1, cfg.beta2,
                  cfg.eps);
}

Tensor flat_view(const Tensor& t) { return t.reshaped({t.numel()}); }

}  // namespace

void sgd_step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads,
              double lr, double momentum, OptimizerState& state) {
    if (params.size() != grads.size())
        throw std::invalid_argument("sgd_step: param/grad count mismatch");
    if (state.m1.empty())
        for (const Tensor* p : params) state.m1.emplace_back(p->shape());
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        const Tensor& g = *grads[i];
        Tensor& v = state.m1[i];
        require_same_shape(p, g, "sgd_step");
        for (std::size_t j = 0; j < p.numel(); ++j) {
            v[j] = momentum * v[j] - lr * g[j];
            p[j] += v[j];
        }
    }
    ++state.step;
}

void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads,
               OptimizerState& state, double lr, double beta1, double beta2,
               double eps) {
    if (params.size() != grads.size())
        throw std::invalid_argument("adam_step: param/grad count mismatch");
    if (state.m1.empty())
        for (const Tensor* p : params) {
            state.m1.emplace_back(p->shape());
            state.m2.emplace_back(p->shape());
        }
    ++state.step;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        const Tensor& g = *grads[i];
        require_same_shape(p, g, "adam_step");
        Tensor& m = state.m1[i];
        Tensor& v = state.m2[i];
        for (std::size_t j = 0; j < p.numel(); ++j) {
            m[j] = beta1 * m[j] + (1.0 - beta1) * g[j];
            v[j] = beta2 * v[j] + (1.0 - beta2) * g[j] * g[j];
            const double mhat = m[j] / c1;
            const double vhat = v[j] / c2;
            p[j] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

std::vector<Sample> make_training_pairs(const PatchDataset& ds,
                                        const MeasurementMatrix& phi, Split split) {
    std::vector<Sample> out;
    for (const auto& p : ds.patches) {
        if (p.split != split) continue;
        Tensor x = flat_view(p.t);
        out.push_back(Sample{sense(phi, x), std::move(x)});
    }
    return out;
}

std::vector<Sample> make_autoencoder_pairs(const PatchDataset& ds, Split split) {
    std::vector<Sample> out;
    for (const auto& p : ds.patches) {
        if (p.split != split) continue;
        Tensor x = flat_view(p.t);
        out.push_back(Sample{x, x});
    }
    return out;
}

namespace {

// One mini-batch of Euclidean forward/backward; returns the batch loss
// and fills `grads`.
double euclidean_batch(ReconNetModel& model, const std::vector<Sample>& train,
                       const std::vector<std::size_t>& batch,
                       ReconNetModel::Grads& grads) {
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    ReconNetModel::Cache cache;
    for (std::size_t idx : batch) {
        const Sample& s = train[idx];
        Tensor pred = model.forward(s.input, cache);
        Tensor gout({kBlockSide, kBlockSide});
        double sq = 0.0;
        for (std::size_t i = 0; i < kBlockPixels; ++i) {
            const double d = pred[i] - s.target[i];
            sq += d * d;
            gout[i] = 2.0 * inv_b * d;
        }
        loss += sq * inv_b;
        ReconNetModel::accumulate(grads, model.backward(cache, gout));
    }
    return loss;
}

}  // namespace

std::vector<double> train_euclidean(ReconNetModel& model,
                                    const std::vector<Sample>& train,
                                    const TrainConfig& cfg) {
    check_cfg(cfg);
    BatchSampler sampler(train.size(), Prng::substream_seed(cfg.seed, 1));
    OptimizerState state;
    std::vector<double> history;
    history.reserve(cfg.iterations);
    auto params = model.named_params();
    std::vector<Tensor*> prefs;
    for (auto& [n, t] : params) prefs.push_back(t);
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        auto batch = sampler.next(cfg.batch_size);
        ReconNetModel::Grads grads = model.zero_grads();
        const double loss = euclidean_batch(model, train, batch, grads);
        if (!std::isfinite(loss)) throw DivergenceError(it, loss);
        apply_step(cfg, prefs, model.grad_refs(grads), state);
        history.push_back(loss);
    }
    return history;
}

GanHistory train_adversarial(ReconNetModel& gen, Discriminator& disc,
                             const std::vector<Sample>& train, const GanConfig& cfg,
                             Encoder* encoder) {
    if (gen.spec.n_units != 1)
        throw std::invalid_argument("train_adversarial: generator must have 1 unit");
    if (cfg.g_steps_per_d < 1)
        throw std::invalid_argument("train_adversarial: g_steps_per_d < 1");
    BatchSampler sampler(train.size(), Prng::substream_seed(cfg.seed, 1));
    Prng aux(Prng::substream_seed(cfg.seed, 2));  // dropout masks
    OptimizerState gstate, dstate;
    GanHistory h;
    const double inv_b = 1.0 / static_cast<double>(cfg.batch_size);

    auto gparams = gen.named_params();
    std::vector<Tensor*> gprefs;
    if (encoder) gprefs.push_back(&encoder->W);
    for (auto& [n, t] : gparams) gprefs.push_back(t);
    auto dparams = disc.named_params();
    std::vector<Tensor*> dprefs;
    for (auto& [n, t] : dparams) dprefs.push_back(t);

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        for (int gs = 0; gs < cfg.g_steps_per_d; ++gs) {
            auto batch = sampler.next(cfg.batch_size);
            ReconNetModel::Grads grads = gen.zero_grads();
            Tensor enc_grad = encoder ? Tensor(encoder->W.shape()) : Tensor();
            double rec = 0.0, adv = 0.0;
            ReconNetModel::Cache cache;
            for (std::size_t idx : batch) {
                const Sample& s = train[idx];
                Tensor y = encoder ? encoder->forward(s.input) : s.input;
                Tensor pred = gen.forward(y, cache);
                Tensor gout({kBlockSide, kBlockSide});
                double sq = 0.0;
                for (std::size_t i = 0; i < kBlockPixels; ++i) {
                    const double d = pred[i] - s.target[i];
                    sq += d * d;
                    gout[i] = 2.0 * cfg.lambda_rec * inv_b * d;
                }
                rec += sq * inv_b;
                if (cfg.lambda_adv > 0.0) {
                    Discriminator::Cache dc;
                    const double prob = disc.forward(pred, Mode::Train, aux, &dc);
                    LossValue bce = bce_loss(prob, 1);
                    adv += bce.value * inv_b;
                    Discriminator::Grads dg =
                        disc.backward(dc, cfg.lambda_adv * inv_b * bce.grad[0]);
                    for (std::size_t i = 0; i < kBlockPixels; ++i)
                        gout[i] += dg.input[i];
                }
                ReconNetModel::Grads sg = gen.backward(cache, gout);
                if (encoder) {
                    Encoder::Grads eg = encoder->backward(s.input, sg.input);
                    for (std::size_t i = 0; i < enc_grad.numel(); ++i)
                        enc_grad[i] += eg.W[i];
                }
                ReconNetModel::accumulate(grads, sg);
            }
            const double gl = cfg.lambda_rec * rec + cfg.lambda_adv * adv;
            if (!std::isfinite(gl)) throw DivergenceError(it, gl);
            std::vector<Tensor*> grefs;
            if (encoder) grefs.push_back(&enc_grad);
            for (Tensor* t : gen.grad_refs(grads)) grefs.push_back(t);
            adam_step(gprefs, grefs, gstate, cfg.lr_g, cfg.beta1, cfg.beta2, cfg.eps);
            ++h.g_updates;
            h.g_rec.push_back(rec);
            h.g_adv.push_back(adv);
            h.g_loss.push_back(gl);
        }

        auto batch = sampler.next(cfg.batch_size);
        Discriminator::Grads dgrads = disc.zero_grads();
        double dl = 0.0, mean_pr = 0.0, mean_pf = 0.0;
        bool saturated = true;
        for (std::size_t idx : batch) {
            const Sample& s = train[idx];
            Discriminator::Cache cr;
            const double pr =
                disc.forward(s.target.reshaped({kBlockSide, kBlockSide}), Mode::Train,
                             aux, &cr);
            LossValue br = bce_loss(pr, 1);
            Discriminator::accumulate(dgrads, disc.backward(cr, inv_b * br.grad[0]));
            Tensor fake =
                encoder ? gen.forward(encoder->forward(s.input)) : gen.forward(s.input);
            Discriminator::Cache cf;
            const double pf = disc.forward(fake, Mode::Train, aux, &cf);
            LossValue bf = bce_loss(pf, 0);
            Discriminator::accumulate(dgrads, disc.backward(cf, inv_b * bf.grad[0]));
            dl += (br.value + bf.value) * inv_b;
            mean_pr += pr * inv_b;
            mean_pf += pf * inv_b;
            if (pr > 1e-3 && pr < 1.0 - 1e-3) saturated = false;
            if (pf > 1e-3 && pf < 1.0 - 1e-3) saturated = false;
        }
        if (!std::isfinite(dl)) throw DivergenceError(it, dl);
        if (saturated)
            std::cerr << "train_adversarial: discriminator saturated at iteration "
                      << it << "\n";
        adam_step(dprefs, disc.grad_refs(dgrads), dstate, cfg.lr_d, cfg.beta1,
                  cfg.beta2, cfg.eps);
        ++h.d_updates;
        h.d_loss.push_back(dl);
        h.d_prob_real.push_back(mean_pr);
        h.d_prob_fake.push_back(mean_pf);
    }
    return h;
}

std::vector<double> train_autoencoder(Encoder& encoder, ReconNetModel& decoder,
                                      const std::vector<Sample>& train,
                                      const TrainConfig& cfg) {
    check_cfg(cfg);
    BatchSampler sampler(train.size(), Prng::substream_seed(cfg.seed, 1));
    OptimizerState state;
    std::vector<double> history;
    auto dparams = decoder.named_params();
    std::vector<Tensor*> prefs{&encoder.W};
    for (auto& [n, t] : dparams) prefs.push_back(t);
    const double inv_b = 1.0 / static_cast<double>(cfg.batch_size);
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        auto batch = sampler.next(cfg.batch_size);
        ReconNetModel::Grads grads = decoder.zero_grads();
        Tensor enc_grad(encoder.W.shape());
        double loss = 0.0;
        ReconNetModel::Cache cache;
        for (std::size_t idx : batch) {
            const Sample& s = train[idx];
            Tensor y = encoder.forward(s.input);
            Tensor pred = decoder.forward(y, cache);
            Tensor gout({kBlockSide, kBlockSide});
            double sq = 0.0;
            for (std::size_t i = 0; i < kBlockPixels; ++i) {
                const double d = pred[i] - s.target[i];
                sq += d * d;
                gout[i] = 2.0 * inv_b * d;
            }
            loss += sq * inv_b;
            ReconNetModel::Grads dg = decoder.backward(cache, gout);
            Encoder::Grads eg = encoder.backward(s.input, dg.input);
            for (std::size_t i = 0; i < enc_grad.numel(); ++i)
                enc_grad[i] += eg.W[i];
            ReconNetModel::accumulate(grads, dg);
        }
        if (!std::isfinite(loss)) throw DivergenceError(it, loss);
        std::vector<Tensor*> grefs{&enc_grad};
        for (Tensor* t : decoder.grad_refs(grads)) grefs.push_back(t);
        apply_step(cfg, prefs, grefs, state);
        history.push_back(loss);
    }
    return history;
}

ReconNetModel finetune_fc(const ReconNetModel& base, const MeasurementMatrix& new_phi,
                          const std::vector<Sample>& train, const TrainConfig& cfg) {
    if (base.spec.first_stage != FirstStage::Fc)
        throw std::invalid_argument(
            "finetune_fc: base model must have an fc first stage");
    check_cfg(cfg);
    ReconNetModel model = base;
    model.m = new_phi.m;
    model.spec.mr = new_phi.mr;
    model.fc = FcLayer(kBlockPixels, model.m);
    Prng rng(Prng::substream_seed(cfg.seed, 3));
    gaussian_fill(model.fc.W, 0.0, cfg.init_std, rng);
    model.fc.b.zero();

    BatchSampler sampler(train.size(), Prng::substream_seed(cfg.seed, 1));
    OptimizerState state;
    std::vector<Tensor*> prefs{&model.fc.W, &model.fc.b};
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        auto batch = sampler.next(cfg.batch_size);
        ReconNetModel::Grads grads = model.zero_grads();
        const double loss = euclidean_batch(model, train, batch, grads);
        if (!std::isfinite(loss)) throw DivergenceError(it, loss);
        std::vector<Tensor*> grefs{&grads.fc_W, &grads.fc_b};
        apply_step(cfg, prefs, grefs, state);
    }
    return model;
}

double mean_euclidean_loss(const ReconNetModel& model,
                           const std::vector<Sample>& valset) {
    if (valset.empty())
        throw std::invalid_argument("mean_euclidean_loss: empty validation set");
    double acc = 0.0;
    for (const Sample& s : valset) {
        Tensor pred = model.forward(s.input);
        double sq = 0.0;
        for (std::size_t i = 0; i < kBlockPixels; ++i) {
            const double d = pred[i] - s.target[i];
            sq += d * d;
        }
        acc += sq;
    }
    return acc / static_cast<double>(valset.size());
}

std::size_t select_by_validation(const std::vector<const ReconNetModel*>& models,
                                 const std::vector<Sample>& valset) {
    if (models.empty()) throw std::invalid_argument("select_by_validation: no models");
    std::size_t best = 0;
    double best_loss = mean_euclidean_loss(*models[0], valset);
    for (std::size_t i = 1; i < models.size(); ++i) {
        const double l = mean_euclidean_loss(*models[i], valset);
        if (l < best_loss) {
            best_loss = l;
            best = i;
        }
    }
    return best;
}

void write_loss_csv(const std::string& path, const std::vector<double>& loss) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_loss_csv: cannot open '" + path + "'");
    os << "iteration,loss\n";
    for (std::size_t i = 0; i < loss.size(); ++i) os << i << "," << loss[i] << "\n";
}

void write_gan_loss_csv(const std::string& path, const GanHistory& h) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_gan_loss_csv: cannot open '" + path + "'");
    os << "iteration,loss,d_loss,g_adv_loss\n";
    for (std::size_t i = 0; i < h.d_loss.size(); ++i) {
        // One row per outer iteration; the generator columns report the
        // last G update of that iteration.
        const std::size_t gi = (i + 1) * h.g_loss.size() / h.d_loss.size() - 1;
        os << i << "," << h.g_loss[gi] << "," << h.d_loss[i] << "," << h.g_adv[gi]
           << "\n";
    }
}

}  // namespace rcn
