#include "rcn/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "rcn/kernels.hpp"

namespace rcn {

namespace {

ReconNetModel make_skeleton(const ReconNetSpec& spec) {
    if (spec.n_units != 1 && spec.n_units != 2)
        throw std::invalid_argument("build_reconnet: n_units must be 1 or 2");
    if (spec.gamma < 1) throw std::invalid_argument("build_reconnet: gamma < 1");
    ReconNetModel model;
    model.spec = spec;
    model.m = mr_to_m(spec.mr, kBlockPixels);
    if (spec.first_stage == FirstStage::Fc) {
        model.fc = FcLayer(kBlockPixels, model.m);
    } else {
        for (int g = 0; g < spec.gamma; ++g)
            model.circ.emplace_back(kBlockPixels, model.m);
    }
    for (int u = 0; u < spec.n_units; ++u) {
        std::size_t in_ch =
            u == 0 ? (spec.first_stage == FirstStage::CirculantBank
                          ? static_cast<std::size_t>(spec.gamma)
                          : 1)
                   : 1;
        for (int i = 0; i < 3; ++i) {
            const std::size_t ks = kConvSizes[i], maps = kConvMaps[i];
            model.convs.push_back(
                ConvLayer{Tensor({ks, ks, in_ch, maps}), Tensor({maps})});
            in_ch = maps;
        }
    }
    return model;
}

Tensor first_feature_map(const ReconNetModel& model, const Tensor& y,
                         std::vector<Tensor>* circ_out) {
    const std::size_t s = kBlockSide;
    if (model.spec.first_stage == FirstStage::Fc) {
        Tensor v = model.fc.forward(y);
        return v.reshaped({s, s, 1});
    }
    const auto gamma = static_cast<std::size_t>(model.spec.gamma);
    Tensor feat({s, s, gamma});
    for (std::size_t g = 0; g < gamma; ++g) {
        Tensor out = model.circ[g].forward(y);
        if (circ_out) circ_out->push_back(out);
        for (std::size_t i = 0; i < s * s; ++i) feat[i * gamma + g] = out[i];
    }
    return feat;
}

}  // namespace

Tensor ReconNetModel::forward(const Tensor& y) const {
    Cache cache;
    return forward(y, cache);
}

Tensor ReconNetModel::forward(const Tensor& y, Cache& cache) const {
    if (y.rank() != 1 || y.numel() != m)
        throw std::invalid_argument("reconnet_forward: measurement length mismatch, got " +
                                    y.shape_str());
    cache.input = y;
    cache.circ_out.clear();
    cache.feats.clear();
    cache.pre.clear();
    cache.feats.push_back(first_feature_map(*this, y, &cache.circ_out));
    for (const ConvLayer& layer : convs) {
        Tensor pre = conv2d_same(cache.feats.back(), layer.k, layer.b);
        cache.feats.push_back(relu(pre));
        cache.pre.push_back(std::move(pre));
    }
    return cache.feats.back().reshaped({kBlockSide, kBlockSide});
}

ReconNetModel::Grads ReconNetModel::zero_grads() const {
    Grads g;
    if (spec.first_stage == FirstStage::Fc) {
        g.fc_W = Tensor(fc.W.shape());
        g.fc_b = Tensor(fc.b.shape());
    } else {
        for (const auto& layer : circ) g.circ_c.emplace_back(layer.c.shape());
    }
    for (const auto& layer : convs)
        g.convs.push_back(ConvLayer{Tensor(layer.k.shape()), Tensor(layer.b.shape())});
    g.input = Tensor({m});
    return g;
}

ReconNetModel::Grads ReconNetModel::backward(const Cache& cache,
                                             const Tensor& grad_out) const {
    if (grad_out.numel() != kBlockPixels)
        throw std::invalid_argument("ReconNetModel::backward: grad shape mismatch");
    Grads grads = zero_grads();
    Tensor g = grad_out.reshaped({kBlockSide, kBlockSide, 1});
    for (std::size_t i = convs.size(); i-- > 0;) {
        g = relu_grad(cache.pre[i], g);
        ConvGrads cg = conv2d_same_grads(cache.feats[i], convs[i].k, g);
        grads.convs[i].k = std::move(cg.grad_k);
        grads.convs[i].b = std::move(cg.grad_bias);
        g = std::move(cg.grad_x);
    }
    if (spec.first_stage == FirstStage::Fc) {
        FcLayer::Grads fg = fc.backward(cache.input, g.reshaped({kBlockPixels}));
        grads.fc_W = std::move(fg.grad_W);
        grads.fc_b = std::move(fg.grad_b);
        grads.input = std::move(fg.grad_x);
    } else {
        const auto gamma = static_cast<std::size_t>(spec.gamma);
        for (std::size_t ch = 0; ch < gamma; ++ch) {
            Tensor gy({kBlockPixels});
            for (std::size_t i = 0; i < kBlockPixels; ++i) gy[i] = g[i * gamma + ch];
            CirculantLayer::Grads cg = circ[ch].backward(cache.input, gy);
            grads.circ_c[ch] = std::move(cg.grad_c);
            for (std::size_t i = 0; i < m; ++i) grads.input[i] += cg.grad_x[i];
        }
    }
    return grads;
}

void ReconNetModel::accumulate(Grads& into, const Grads& g) {
    auto add = [](Tensor& a, const Tensor& b) {
        for (std::size_t i = 0; i < a.numel(); ++i) a[i] += b[i];
    };
    if (into.fc_W.numel()) add(into.fc_W, g.fc_W);
    if (into.fc_b.numel()) add(into.fc_b, g.fc_b);
    for (std::size_t i = 0; i < into.circ_c.size(); ++i)
        add(into.circ_c[i], g.circ_c[i]);
    for (std::size_t i = 0; i < into.convs.size(); ++i) {
        add(into.convs[i].k, g.convs[i].k);
        add(into.convs[i].b, g.convs[i].b);
    }
    add(into.input, g.input);
}

std::vector<std::pair<std::string, Tensor*>> ReconNetModel::named_params() {
    std::vector<std::pair<std::string, Tensor*>> out;
    if (spec.first_stage == FirstStage::Fc) {
        out.emplace_back("fc.W", &fc.W);
        out.emplace_back("fc.b", &fc.b);
    } else {
        for (std::size_t g = 0; g < circ.size(); ++g)
            out.emplace_back("circ.c" + std::to_string(g), &circ[g].c);
    }
    for (std::size_t i = 0; i < convs.size(); ++i) {
        const std::string base =
            "u" + std::to_string(i / 3) + ".conv" + std::to_string(i % 3);
        out.emplace_back(base + ".k", &convs[i].k);
        out.emplace_back(base + ".b", &convs[i].b);
    }
    return out;
}

std::vector<std::pair<std::string, const Tensor*>> ReconNetModel::named_params() const {
    auto mut = const_cast<ReconNetModel*>(this)->named_params();
    std::vector<std::pair<std::string, const Tensor*>> out;
    out.reserve(mut.size());
    for (auto& [n, t] : mut) out.emplace_back(n, t);
    return out;
}

std::vector<Tensor*> ReconNetModel::grad_refs(Grads& g) const {
    std::vector<Tensor*> out;
    if (spec.first_stage == FirstStage::Fc) {
        out.push_back(&g.fc_W);
        out.push_back(&g.fc_b);
    } else {
        for (auto& t : g.circ_c) out.push_back(&t);
    }
    for (auto& layer : g.convs) {
        out.push_back(&layer.k);
        out.push_back(&layer.b);
    }
    return out;
}

ReconNetModel build_reconnet(const ReconNetSpec& spec, const FcInit& init, Prng& rng) {
    ReconNetModel model = make_skeleton(spec);
    if (init.kind == FcInit::FromPhiTranspose) {
        if (spec.first_stage != FirstStage::Fc)
            throw std::invalid_argument(
                "build_reconnet: phi-transpose init requires an fc first stage");
        if (!init.phi || init.phi->m != model.m)
            throw std::invalid_argument("build_reconnet: phi measurement count mismatch");
        for (std::size_t i = 0; i < kBlockPixels; ++i)
            for (std::size_t j = 0; j < model.m; ++j)
                model.fc.W.at(i, j) = init.phi->phi.at(j, i);
        model.fc.b.zero();
    } else {
        if (spec.first_stage == FirstStage::Fc) {
            gaussian_fill(model.fc.W, 0.0, init.std, rng);
            model.fc.b.zero();
        } else {
            for (auto& layer : model.circ) gaussian_fill(layer.c, 0.0, init.std, rng);
        }
    }
    for (auto& layer : model.convs) {
        gaussian_fill(layer.k, 0.0, init.std, rng);
        layer.b.zero();
    }
    return model;
}

Tensor reconnet_forward(const ReconNetModel& model, const Tensor& y) {
    return model.forward(y);
}

// ---------------------------------------------------------------------------
// Discriminator
// ---------------------------------------------------------------------------

double Discriminator::forward(const Tensor& block, Mode mode, Prng& rng,
                              Cache* cache) const {
    if (block.numel() != kBlockPixels)
        throw std::invalid_argument("Discriminator::forward: block must be 33x33");
    Cache local;
    Cache& c = cache ? *cache : local;
    c.x0 = block.reshaped({kBlockSide, kBlockSide, 1});
    c.pre1 = conv2d_valid(c.x0, c1.k, c1.b, 2);
    c.f1 = relu(c.pre1);
    c.pre2 = conv2d_valid(c.f1, c2.k, c2.b, 2);
    c.f2 = relu(c.pre2);
    c.pre3 = conv2d_valid(c.f2, c3.k, c3.b, 2);
    c.f3 = relu(c.pre3);
    c.flat = c.f3.reshaped({c.f3.numel()});
    c.mask = drop.make_mask({c.flat.numel()}, mode, rng);
    c.dropped = Dropout::apply(c.flat, c.mask);
    c.logit = fc.forward(c.dropped)[0];
    c.prob = sigmoid(c.logit);
    return c.prob;
}

Discriminator::Grads Discriminator::zero_grads() const {
    Grads g;
    g.c1 = ConvLayer{Tensor(c1.k.shape()), Tensor(c1.b.shape())};
    g.c2 = ConvLayer{Tensor(c2.k.shape()), Tensor(c2.b.shape())};
    g.c3 = ConvLayer{Tensor(c3.k.shape()), Tensor(c3.b.shape())};
    g.fc_W = Tensor(fc.W.shape());
    g.fc_b = Tensor(fc.b.shape());
    g.input = Tensor({kBlockSide, kBlockSide});
    return g;
}

Discriminator::Grads Discriminator::backward(const Cache& cache, double dprob) const {
    Grads g = zero_grads();
    const double dlogit = sigmoid_grad_from_output(cache.prob, dprob);
    Tensor glogit({1});
    glogit[0] = dlogit;
    FcLayer::Grads fg = fc.backward(cache.dropped, glogit);
    g.fc_W = std::move(fg.grad_W);
    g.fc_b = std::move(fg.grad_b);
    Tensor gflat = Dropout::apply(fg.grad_x, cache.mask);
    Tensor g3 = relu_grad(cache.pre3, gflat.reshaped(cache.pre3.shape()));
    ConvGrads cg3 = conv2d_valid_grads(cache.f2, c3.k, g3, 2);
    g.c3 = ConvLayer{std::move(cg3.grad_k), std::move(cg3.grad_bias)};
    Tensor g2 = relu_grad(cache.pre2, cg3.grad_x);
    ConvGrads cg2 = conv2d_valid_grads(cache.f1, c2.k, g2, 2);
    g.c2 = ConvLayer{std::move(cg2.grad_k), std::move(cg2.grad_bias)};
    Tensor g1 = relu_grad(cache.pre1, cg2.grad_x);
    ConvGrads cg1 = conv2d_valid_grads(cache.x0, c1.k, g1, 2);
    g.c1 = ConvLayer{std::move(cg1.grad_k), std::move(cg1.grad_bias)};
    g.input = cg1.grad_x.reshaped({kBlockSide, kBlockSide});
    return g;
}

void Discriminator::accumulate(Grads& into, const Grads& g) {
    auto add = [](Tensor& a, const Tensor& b) {
        for (std::size_t i = 0; i < a.numel(); ++i) a[i] += b[i];
    };
    add(into.c1.k, g.c1.k);
    add(into.c1.b, g.c1.b);
    add(into.c2.k, g.c2.k);
    add(into.c2.b, g.c2.b);
    add(into.c3.k, g.c3.k);
    add(into.c3.b, g.c3.b);
    add(into.fc_W, g.fc_W);
    add(into.fc_b, g.fc_b);
    add(into.input, g.input);
}

std::vector<std::pair<std::string, Tensor*>> Discriminator::named_params() {
    return {{"d.c1.k", &c1.k}, {"d.c1.b", &c1.b}, {"d.c2.k", &c2.k},
            {"d.c2.b", &c2.b}, {"d.c3.k", &c3.k}, {"d.c3.b", &c3.b},
            {"d.fc.W", &fc.W}, {"d.fc.b", &fc.b}};
}

std::vector<Tensor*> Discriminator::grad_refs(Grads& g) const {
    return {&g.c1.k, &g.c1.b, &g.c2.k, &g.c2.b, &g.c3.k, &g.c3.b, &g.fc_W, &g.fc_b};
}

Discriminator build_discriminator(Prng& rng) {
    Discriminator d;
    d.c1 = ConvLayer{Tensor({4, 4, 1, 4}), Tensor({4})};
    d.c2 = ConvLayer{Tensor({4, 4, 4, 4}), Tensor({4})};
    d.c3 = ConvLayer{Tensor({4, 4, 4, 4}), Tensor({4})};
    d.fc = FcLayer(1, 16);
    gaussian_fill(d.c1.k, 0.0, 0.02, rng);
    gaussian_fill(d.c2.k, 0.0, 0.02, rng);
    gaussian_fill(d.c3.k, 0.0, 0.02, rng);
    gaussian_fill(d.fc.W, 0.0, 0.02, rng);
    return d;
}

// ---------------------------------------------------------------------------
// Encoder
// ---------------------------------------------------------------------------

Tensor Encoder::forward(const Tensor& x) const { return matvec(W, x); }

Encoder::Grads Encoder::backward(const Tensor& x, const Tensor& grad_y) const {
    const std::size_t m = W.extent(0), n = W.extent(1);
    if (grad_y.numel() != m || x.numel() != n)
        throw std::invalid_argument("Encoder::backward: shape mismatch");
    Grads g{Tensor({m, n}), Tensor({n})};
    for (std::size_t i = 0; i < m; ++i) {
        const double gy = grad_y[i];
        const double* wrow = W.data() + i * n;
        double* grow = g.W.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            grow[j] = gy * x[j];
            g.input[j] += wrow[j] * gy;
        }
    }
    return g;
}

MeasurementMatrix Encoder::export_phi(double mr) const {
    MeasurementMatrix phi;
    phi.phi = W;
    phi.mr = mr;
    phi.n = W.extent(1);
    phi.m = W.extent(0);
    phi.kind = PhiKind::Learned;
    phi.seed = 0;
    return phi;
}

Encoder build_encoder(std::size_t m, Prng& rng) {
    if (m < 1 || m > kBlockPixels)
        throw std::invalid_argument("build_encoder: m out of [1, 1089]");
    Encoder e{Tensor({m, kBlockPixels})};
    gaussian_fill(e.W, 0.0, 1.0 / std::sqrt(static_cast<double>(kBlockPixels)), rng);
    return e;
}

std::size_t param_count(const ReconNetModel& model, bool include_bias) {
    std::size_t count = 0;
    if (model.spec.first_stage == FirstStage::Fc) {
        count += model.fc.W.numel();
        if (include_bias) count += model.fc.b.numel();
    } else {
        for (const auto& layer : model.circ) count += layer.c.numel();
    }
    for (const auto& layer : model.convs) {
        count += layer.k.numel();
        if (include_bias) count += layer.b.numel();
    }
    return count;
}

// ---------------------------------------------------------------------------
// Checkpoint container
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'R', 'C', 'N', '1'};

template <typename T>
void write_le(std::ostream& os, T v) {
    // Host is little-endian on every supported target.
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

void write_str16(std::ostream& os, const std::string& s) {
    if (s.size() > 0xFFFF) throw std::invalid_argument("checkpoint: string too long");
    write_le<std::uint16_t>(os, static_cast<std::uint16_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_str16(std::istream& is) {
    const auto len = read_le<std::uint16_t>(is);
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (!is) throw std::runtime_error("checkpoint: truncated file");
    return s;
}

}  // namespace

const std::string* Checkpoint::find_meta(const std::string& key) const {
    for (const auto& [k, v] : metadata)
        if (k == key) return &v;
    return nullptr;
}

const Tensor* Checkpoint::find_tensor(const std::string& name) const {
    for (const auto& [k, t] : tensors)
        if (k == name) return &t;
    return nullptr;
}

void save_checkpoint_file(const Checkpoint& ck, const std::string& path, bool as_f32) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("checkpoint: cannot open '" + path + "' for write");
    os.write(kMagic, 4);
    write_le<std::uint32_t>(os, ck.version);
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(ck.metadata.size()));
    for (const auto& [k, v] : ck.metadata) {
        write_str16(os, k);
        write_str16(os, v);
    }
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(ck.tensors.size()));
    for (const auto& [name, t] : ck.tensors) {
        write_str16(os, name);
        write_le<std::uint8_t>(os, as_f32 ? 1 : 0);
        write_le<std::uint8_t>(os, static_cast<std::uint8_t>(t.rank()));
        for (std::size_t d = 0; d < t.rank(); ++d)
            write_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.extent(d)));
        if (as_f32) {
            for (std::size_t i = 0; i < t.numel(); ++i)
                write_le<float>(os, static_cast<float>(t[i]));
        } else {
            os.write(reinterpret_cast<const char*>(t.data()),
                     static_cast<std::streamsize>(t.numel() * sizeof(double)));
        }
    }
    if (!os) throw std::runtime_error("checkpoint: write failed for '" + path + "'");
}

Checkpoint load_checkpoint_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("checkpoint: bad magic in '" + path + "'");
    Checkpoint ck;
    ck.version = read_le<std::uint32_t>(is);
    if (ck.version != 1)
        throw std::runtime_error("checkpoint: unsupported version " +
                                 std::to_string(ck.version));
    const auto nmeta = read_le<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < nmeta; ++i) {
        std::string k = read_str16(is);
        std::string v = read_str16(is);
        ck.metadata.emplace_back(std::move(k), std::move(v));
    }
    const auto ntensors = read_le<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < ntensors; ++i) {
        std::string name = read_str16(is);
        const auto dtype = read_le<std::uint8_t>(is);
        if (dtype > 1) throw std::runtime_error("checkpoint: unknown dtype code");
        const auto rank = read_le<std::uint8_t>(is);
        std::vector<std::size_t> shape(rank);
        for (auto& e : shape) e = read_le<std::uint32_t>(is);
        Tensor t(shape);
        if (dtype == 0) {
            is.read(reinterpret_cast<char*>(t.data()),
                    static_cast<std::streamsize>(t.numel() * sizeof(double)));
            if (!is) throw std::runtime_error("checkpoint: truncated tensor payload");
        } else {
            for (std::size_t j = 0; j < t.numel(); ++j)
                t[j] = static_cast<double>(read_le<float>(is));
        }
        ck.tensors.emplace_back(std::move(name), std::move(t));
    }
    return ck;
}

namespace {

void put_phi_meta(Checkpoint& ck, const MeasurementMatrix& phi) {
    ck.metadata.emplace_back("phi.kind", phi_kind_name(phi.kind));
    ck.metadata.emplace_back("phi.mr", std::to_string(phi.mr));
    ck.metadata.emplace_back("phi.seed", std::to_string(phi.seed));
    ck.metadata.emplace_back("phi.bits", std::to_string(phi.bits));
}

MeasurementMatrix get_phi(const Checkpoint& ck) {
    const Tensor* t = ck.find_tensor("phi");
    if (!t) throw std::runtime_error("checkpoint: missing tensor 'phi'");
    if (t->rank() != 2) throw std::runtime_error("checkpoint: 'phi' must be rank 2");
    MeasurementMatrix phi;
    phi.phi = *t;
    phi.m = t->extent(0);
    phi.n = t->extent(1);
    const std::string* kind = ck.find_meta("phi.kind");
    const std::string* mr = ck.find_meta("phi.mr");
    if (!kind || !mr) throw std::runtime_error("checkpoint: missing phi metadata");
    phi.kind = phi_kind_from_name(*kind);
    phi.mr = std::stod(*mr);
    if (const std::string* s = ck.find_meta("phi.seed")) phi.seed = std::stoull(*s);
    if (const std::string* s = ck.find_meta("phi.bits")) phi.bits = std::stoi(*s);
    return phi;
}

}  // namespace

Checkpoint model_to_checkpoint(const ReconNetModel& model,
                               const MeasurementMatrix& phi) {
    Checkpoint ck;
    ck.metadata.emplace_back("mr", std::to_string(model.spec.mr));
    ck.metadata.emplace_back("n_units", std::to_string(model.spec.n_units));
    ck.metadata.emplace_back(
        "first_stage",
        model.spec.first_stage == FirstStage::Fc ? "fc" : "circulant");
    ck.metadata.emplace_back("gamma", std::to_string(model.spec.gamma));
    ck.metadata.emplace_back("m", std::to_string(model.m));
    put_phi_meta(ck, phi);
    ck.tensors.emplace_back("phi", phi.phi);
    for (const auto& [name, t] : model.named_params())
        ck.tensors.emplace_back(name, *t);
    return ck;
}

std::pair<ReconNetModel, MeasurementMatrix> model_from_checkpoint(const Checkpoint& ck) {
    const std::string* mr = ck.find_meta("mr");
    const std::string* n_units = ck.find_meta("n_units");
    const std::string* first = ck.find_meta("first_stage");
    const std::string* gamma = ck.find_meta("gamma");
    if (!mr || !n_units || !first || !gamma)
        throw std::runtime_error("checkpoint: missing model metadata");
    ReconNetSpec spec;
    spec.mr = std::stod(*mr);
    spec.n_units = std::stoi(*n_units);
    spec.first_stage = *first == "fc" ? FirstStage::Fc : FirstStage::CirculantBank;
    spec.gamma = std::stoi(*gamma);
    ReconNetModel model = make_skeleton(spec);
    std::vector<std::string> known{"phi"};
    for (auto& [name, t] : model.named_params()) {
        const Tensor* src = ck.find_tensor(name);
        if (!src) throw std::runtime_error("checkpoint: missing tensor '" + name + "'");
        if (!src->same_shape(*t))
            throw std::runtime_error("checkpoint: shape mismatch for '" + name + "'");
        *t = *src;
        known.push_back(name);
    }
    for (const auto& [name, t] : ck.tensors)
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw std::runtime_error("checkpoint: unknown tensor '" + name + "'");
    MeasurementMatrix phi = get_phi(ck);
    if (phi.m != model.m)
        throw std::runtime_error("checkpoint: phi row count disagrees with model");
    return {std::move(model), std::move(phi)};
}

Checkpoint phi_to_checkpoint(const MeasurementMatrix& phi) {
    Checkpoint ck;
    put_phi_meta(ck, phi);
    ck.tensors.emplace_back("phi", phi.phi);
    return ck;
}

MeasurementMatrix phi_from_checkpoint(const Checkpoint& ck) { return get_phi(ck); }

void save_model(const ReconNetModel& model, const MeasurementMatrix& phi,
                const std::string& path) {
    save_checkpoint_file(model_to_checkpoint(model, phi), path);
}

std::pair<ReconNetModel, MeasurementMatrix> load_model(const std::string& path) {
    return model_from_checkpoint(load_checkpoint_file(path));
}

}  // namespace rcn
