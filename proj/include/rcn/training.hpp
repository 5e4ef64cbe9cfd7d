#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcn/datapipe.hpp"
#include "rcn/models.hpp"

namespace rcn {

enum class OptKind { Sgd, Adam };

struct TrainConfig {
    std::size_t batch_size = 128;
    std::size_t iterations = 1000;
    double learning_rate = 1e-3;
    OptKind optimizer = OptKind::Sgd;
    double momentum = 0.9;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::uint64_t seed = 1;
    // Std of the random FC re-initialization in finetune_fc. It must be
    // large enough that the re-initialized layer's outputs reach the
    // scale of the images the frozen convolution stack was trained on;
    // far smaller values can leave every first-conv ReLU inactive, which
    // zeroes the gradient into the new FC layer permanently.
    double init_std = 0.1;
};

struct GanConfig {
    double lambda_rec = 1.0;
    double lambda_adv = 1e-4;
    double lr_g = 1e-3;
    double lr_d = 1e-5;
    int g_steps_per_d = 2;
    std::size_t iterations = 100000;
    std::size_t batch_size = 128;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::uint64_t seed = 1;
};

// Per-parameter moment buffers; first use fixes the shapes.
struct OptimizerState {
    std::vector<Tensor> m1, m2;
    std::size_t step = 0;
};

void sgd_step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads,
              double lr, double momentum, OptimizerState& state);

void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads,
               OptimizerState& state, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

// Thrown when a training loss goes non-finite.
struct DivergenceError : std::runtime_error {
    std::size_t iteration;
    double loss;
    DivergenceError(std::size_t it, double l)
        : std::runtime_error("training diverged at iteration " + std::to_string(it) +
                             " (loss = " + std::to_string(l) + ")"),
          iteration(it), loss(l) {}
};

struct Sample {
    Tensor input;   // measurement vector [m] (or patch [1089] for autoencoders)
    Tensor target;  // vectorized patch [1089]
};

// Senses every patch of the requested split: (phi * x, x) pairs.
std::vector<Sample> make_training_pairs(const PatchDataset& ds,
                                        const MeasurementMatrix& phi, Split split);

// Identity pairs (x, x) for joint measurement-matrix learning.
std::vector<Sample> make_autoencoder_pairs(const PatchDataset& ds, Split split);

std::vector<double> train_euclidean(ReconNetModel& model,
                                    const std::vector<Sample>& train,
                                    const TrainConfig& cfg);

struct GanHistory {
    std::vector<double> g_loss, g_rec, g_adv, d_loss;
    std::vector<double> d_prob_real, d_prob_fake;  // per D update, batch means
    std::size_t g_updates = 0, d_updates = 0;
};

// With a non-null encoder the samples must be (x, x) pairs; the
// generator consumes encoder(x) and the encoder weights train jointly
// with the generator (the adversarial learned-measurement variant).
GanHistory train_adversarial(ReconNetModel& gen, Discriminator& disc,
                             const std::vector<Sample>& train, const GanConfig& cfg,
                             Encoder* encoder = nullptr);

// Joint encoder + decoder training on (x, x) pairs; the learned
// measurement matrix is encoder.export_phi(mr) afterwards.
std::vector<double> train_autoencoder(Encoder& encoder, ReconNetModel& decoder,
                                      const std::vector<Sample>& train,
                                      const TrainConfig& cfg);

// Re-initializes the FC first stage for new_phi and trains only that
// layer; every convolution tensor stays bitwise identical to the base.
ReconNetModel finetune_fc(const ReconNetModel& base, const MeasurementMatrix& new_phi,
                          const std::vector<Sample>& train, const TrainConfig& cfg);

double mean_euclidean_loss(const ReconNetModel& model,
                           const std::vector<Sample>& valset);

// Argmin of mean Euclidean validation loss; ties keep the earliest.
std::size_t select_by_validation(const std::vector<const ReconNetModel*>& models,
                                 const std::vector<Sample>& valset);

void write_loss_csv(const std::string& path, const std::vector<double>& loss);
void write_gan_loss_csv(const std::string& path, const GanHistory& h);

}  // namespace rcn
