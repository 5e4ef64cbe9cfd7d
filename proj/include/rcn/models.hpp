#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rcn/layers.hpp"
#include "rcn/sensing.hpp"
#include "rcn/tensor.hpp"

namespace rcn {

enum class FirstStage { Fc, CirculantBank };

struct ReconNetSpec {
    double mr = 0.25;
    int n_units = 2;  // 2 for Euclidean-only, 1 for adversarial
    FirstStage first_stage = FirstStage::Fc;
    int gamma = 1;  // circulant bank width
};

struct ConvLayer {
    Tensor k;  // [kh x kw x c_in x c_out]
    Tensor b;  // [c_out]
};

// Per-unit convolution plan: 11x11 -> 64 maps, 1x1 -> 32 maps,
// 7x7 -> 1 map, ReLU after each.
inline constexpr std::size_t kConvSizes[3] = {11, 1, 7};
inline constexpr std::size_t kConvMaps[3] = {64, 32, 1};

struct FcInit {
    enum Kind { Gaussian, FromPhiTranspose } kind = Gaussian;
    double std = 0.01;                    // for Gaussian
    const MeasurementMatrix* phi = nullptr;  // for FromPhiTranspose
};

class ReconNetModel {
public:
    ReconNetSpec spec;
    std::size_t m = 0;  // measurement count

    FcLayer fc;                         // first stage when Fc
    std::vector<CirculantLayer> circ;   // first stage when CirculantBank
    std::vector<ConvLayer> convs;       // 3 * n_units

    struct Cache {
        Tensor input;               // y [m]
        std::vector<Tensor> circ_out;
        std::vector<Tensor> feats;  // feats[0] first feature map, then post-ReLU
        std::vector<Tensor> pre;    // conv outputs before ReLU
    };

    // Grads are model-shaped: same tensors, plus the input gradient
    // needed when a decoder sits behind a learnable encoder.
    struct Grads {
        Tensor fc_W, fc_b;
        std::vector<Tensor> circ_c;
        std::vector<ConvLayer> convs;
        Tensor input;
    };

    Tensor forward(const Tensor& y) const;
    Tensor forward(const Tensor& y, Cache& cache) const;
    Grads backward(const Cache& cache, const Tensor& grad_out) const;
    Grads zero_grads() const;
    static void accumulate(Grads& into, const Grads& g);

    std::vector<std::pair<std::string, Tensor*>> named_params();
    std::vector<std::pair<std::string, const Tensor*>> named_params() const;
    std::vector<Tensor*> grad_refs(Grads& g) const;
};

ReconNetModel build_reconnet(const ReconNetSpec& spec, const FcInit& init, Prng& rng);

Tensor reconnet_forward(const ReconNetModel& model, const Tensor& y);

// -----------------------------------------------------------------------
// Discriminator: three 4x4 stride-2 valid convolutions with 4 maps each
// (33 -> 15 -> 6 -> 2), ReLU between them, dropout before the final FC,
// sigmoid output.
// -----------------------------------------------------------------------
class Discriminator {
public:
    ConvLayer c1, c2, c3;
    FcLayer fc;  // 16 -> 1
    Dropout drop{0.5};

    struct Cache {
        Tensor x0;
        Tensor pre1, f1, pre2, f2, pre3, f3;
        Tensor flat, dropped, mask;
        double logit = 0.0, prob = 0.0;
    };

    struct Grads {
        ConvLayer c1, c2, c3;
        Tensor fc_W, fc_b;
        Tensor input;  // [33 x 33]
    };

    double forward(const Tensor& block, Mode mode, Prng& rng, Cache* cache) const;
    Grads backward(const Cache& cache, double dprob) const;
    Grads zero_grads() const;
    static void accumulate(Grads& into, const Grads& g);

    std::vector<std::pair<std::string, Tensor*>> named_params();
    std::vector<Tensor*> grad_refs(Grads& g) const;
};

Discriminator build_discriminator(Prng& rng);

// Bias-free linear encoder 1089 -> m; its weight matrix is the learned
// measurement matrix.
struct Encoder {
    Tensor W;  // [m x 1089]

    Tensor forward(const Tensor& x) const;
    struct Grads {
        Tensor W, input;
    };
    Grads backward(const Tensor& x, const Tensor& grad_y) const;
    MeasurementMatrix export_phi(double mr) const;
};

Encoder build_encoder(std::size_t m, Prng& rng);

std::size_t param_count(const ReconNetModel& model, bool include_bias);

// -----------------------------------------------------------------------
// Checkpoint container. Byte layout: magic "RCN1", little-endian,
// u32 version, u32 metadata count, (u16 key len, key, u16 value len,
// value) pairs, u32 tensor count, per tensor (u16 name len, name,
// u8 dtype {0 = f64, 1 = f32}, u8 rank, rank x u32 extents, row-major
// payload).
// -----------------------------------------------------------------------
struct Checkpoint {
    std::uint32_t version = 1;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::pair<std::string, Tensor>> tensors;

    const std::string* find_meta(const std::string& key) const;
    const Tensor* find_tensor(const std::string& name) const;
};

// dtype f32 stores tensors as float payloads (checkpoint storage option);
// the in-memory representation stays f64.
void save_checkpoint_file(const Checkpoint& ck, const std::string& path,
                          bool as_f32 = false);
Checkpoint load_checkpoint_file(const std::string& path);

Checkpoint model_to_checkpoint(const ReconNetModel& model, const MeasurementMatrix& phi);
std::pair<ReconNetModel, MeasurementMatrix> model_from_checkpoint(const Checkpoint& ck);

Checkpoint phi_to_checkpoint(const MeasurementMatrix& phi);
MeasurementMatrix phi_from_checkpoint(const Checkpoint& ck);

void save_model(const ReconNetModel& model, const MeasurementMatrix& phi,
                const std::string& path);
std::pair<ReconNetModel, MeasurementMatrix> load_model(const std::string& path);

}  // namespace rcn
