#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "rcn/training.hpp"

using namespace rcn;

namespace {

std::vector<Sample> random_pairs(const MeasurementMatrix& phi, std::size_t count,
                                 std::uint64_t seed) {
    Prng rng(seed);
    std::vector<Sample> out;
    for (std::size_t i = 0; i < count; ++i) {
        Tensor x({kBlockPixels});
        for (std::size_t j = 0; j < kBlockPixels; ++j) x[j] = rng.next_double();
        out.push_back(Sample{sense(phi, x), x});
    }
    return out;
}

// Smooth sinusoidal patch; structured targets that the conv stack can
// actually drive to near-zero loss in a small iteration budget.
Tensor smooth_patch(std::uint64_t seed) {
    Prng rng(seed);
    Tensor p({kBlockPixels});
    const double a1 = rng.next_double(), a2 = rng.next_double();
    const double ph = 6.28 * rng.next_double();
    for (std::size_t y = 0; y < 33; ++y)
        for (std::size_t x = 0; x < 33; ++x)
            p[y * 33 + x] =
                0.5 + 0.45 * std::sin(0.1 * a1 * static_cast<double>(x) +
                                      0.12 * a2 * static_cast<double>(y) + ph) *
                          std::cos(0.07 * static_cast<double>(x) -
                                   0.05 * static_cast<double>(y));
    return p;
}

ReconNetModel fresh_model(double mr, int n_units, std::uint64_t seed) {
    Prng rng(seed);
    ReconNetSpec spec;
    spec.mr = mr;
    spec.n_units = n_units;
    return build_reconnet(spec, FcInit{}, rng);
}

bool params_bitwise_equal(const ReconNetModel& a, const ReconNetModel& b) {
    auto pa = a.named_params();
    auto pb = b.named_params();
    if (pa.size() != pb.size()) return false;
    for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pa[i].second->numel(); ++j)
            if ((*pa[i].second)[j] != (*pb[i].second)[j]) return false;
    return true;
}

}  // namespace

TEST_CASE("sgd_step: hand-iterated oracle on f(w) = w^2") {
    Tensor w({1}, {1.0});
    OptimizerState state;
    Tensor g({1});
    g[0] = 2.0 * w[0];
    sgd_step({&w}, {&g}, 0.1, 0.9, state);
    CHECK(w[0] == doctest::Approx(0.8).epsilon(1e-15));
    g[0] = 2.0 * w[0];
    sgd_step({&w}, {&g}, 0.1, 0.9, state);
    CHECK(w[0] == doctest::Approx(0.46).epsilon(1e-15));
    CHECK(state.step == 2);
}

TEST_CASE("sgd_step: zero gradient leaves parameters fixed; momentum 0 is vanilla") {
    Tensor w({3}, {1.0, -2.0, 0.5});
    Tensor zero({3});
    OptimizerState s1;
    sgd_step({&w}, {&zero}, 0.1, 0.9, s1);
    CHECK(w[0] == 1.0);
    CHECK(w[1] == -2.0);

    Tensor g({3}, {1.0, 2.0, 3.0});
    OptimizerState s2;
    sgd_step({&w}, {&g}, 0.5, 0.0, s2);
    CHECK(w[0] == doctest::Approx(1.0 - 0.5).epsilon(1e-15));
    CHECK(w[2] == doctest::Approx(0.5 - 1.5).epsilon(1e-15));

    Tensor bad({2});
    OptimizerState s3;
    CHECK_THROWS(sgd_step({&w}, {&bad}, 0.1, 0.9, s3));
}

TEST_CASE("adam_step: first step is approximately lr * sign(g)") {
    Tensor w({1}, {1.0});
    Tensor g({1}, {2.0});
    OptimizerState state;
    adam_step({&w}, {&g}, state, 0.001);
    CHECK(w[0] == doctest::Approx(0.999).epsilon(1e-6));

    Tensor w2({4}, {1.0, 1.0, 1.0, 1.0});
    Tensor z({4});
    OptimizerState s2;
    for (int i = 0; i < 5; ++i) adam_step({&w2}, {&z}, s2, 0.1);
    for (std::size_t i = 0; i < 4; ++i) CHECK(w2[i] == 1.0);
}

TEST_CASE("train_euclidean: overfits a single patch") {
    MeasurementMatrix phi = gen_gaussian_orthonormal(kBlockPixels, 0.25, 21);
    Tensor x = smooth_patch(22);
    std::vector<Sample> train{Sample{sense(phi, x), x}};
    ReconNetModel model = fresh_model(0.25, 1, 23);
    TrainConfig cfg;
    cfg.batch_size = 1;
    cfg.iterations = 1000;
    cfg.optimizer = OptKind::Adam;
    cfg.learning_rate = 2e-3;
    cfg.seed = 24;
    auto history = train_euclidean(model, train, cfg);
    REQUIRE(history.size() == 1000);
    // polish at a lower rate to settle the Adam oscillation floor
    cfg.iterations = 300;
    cfg.learning_rate = 1e-4;
    auto polish = train_euclidean(model, train, cfg);
    CHECK(polish.back() < 1e-3);
    CHECK(polish.back() < history.front());
}

TEST_CASE("train_euclidean: same seed gives identical loss histories") {
    MeasurementMatrix phi = gen_gaussian_orthonormal(kBlockPixels, 0.01, 31);
    auto train = random_pairs(phi, 8, 32);
    TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.iterations = 12;
    cfg.learning_rate = 1e-3;
    cfg.seed = 33;
    ReconNetModel a = fresh_model(0.01, 1, 34);
    ReconNetModel b = fresh_model(0.01, 1, 34);
    auto ha = train_euclidean(a, train, cfg);
    auto hb = train_euclidean(b, train, cfg);
    for (std::size_t i = 0; i < ha.size(); ++i) CHECK(ha[i] == hb[i]);
    CHECK(params_bitwise_equal(a, b));
}

TEST_CASE("train_euclidean: lr 0 leaves the model untouched with a flat history") {
    MeasurementMatrix phi = gen_gaussian_orthonormal(kBlockPixels, 0.01, 41);
    auto train = random_pairs(phi, 3, 42);
    ReconNetModel model = fresh_model(0.01, 1, 43);
    ReconNetModel before = model;
    TrainConfig cfg;
    cfg.batch_size = 3;
    cfg.iterations = 5;
    cfg.learning_rate = 0.0;
    cfg.seed = 44;
    auto history = train_euclidean(model, train, cfg);
    CHECK(params_bitwise_equal(model, before));
    for (double l : history) CHECK(l == history.front());
}

TEST_CASE("train_euclidean: full-batch loss is non-increasing at a small rate") {
    MeasurementMatrix phi = gen_gaussian_orthonormal(kBlockPixels, 0.01, 51);
    auto train = random_pairs(phi, 4, 52);
    ReconNetModel model = fresh_model(0.01, 1, 53);
    TrainConfig cfg;
    cfg.batch_size = 4;  // whole dataset per step
    cfg.iterations = 10;
    cfg.learning_rate = 1e-5;
    cfg.momentum = 0.0;
    cfg.seed = 54;
    auto history = train_euclidean(model, train, cfg);
    for (std::size_t i = 1; i < history.size(); ++i)
        CHECK(history[i] <= history[i - 1] + 1e-9);
}

TEST_CASE("train_euclidean: non-finite loss raises a divergence error") {
    MeasurementMatrix phi = gen_gaussian_orthonormal(kBlockPixels, 0.01, 61);
    auto train = random_pairs(phi, 2, 62);
    ReconNetModel model = fresh_model(0.01, 1, 63);
    TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.iterations = 50;
    cfg.learning_rate = 1e30;
    cfg.seed = 64;
    CHECK_THROWS_AS(train_euclidean(model, train, cfg), DivergenceError);
}

TEST_CASE("train_adversarial: update accounting is exactly g_steps_per_d to 1") {
    MeasurementMatrix phi = gen_gaussian_orthonormal(kBlockPixels, 0.01, 71);
    auto train = random_pairs(phi, 6, 72);
    ReconNetModel gen = fresh_model(0.01, 1, 73);
    Prng drng(74);
    Discriminator disc = build_discriminator(drng);
    GanConfig cfg;
    cfg.iterations = 5;
    cfg.batch_size = 2;
    cfg.seed = 75;
    GanHistory h = train_adversarial(gen, disc, train, cfg);
    CHECK(h.g_updates == 10);
    CHECK(h.d_updates == 5);
    CHECK(h.g_loss.size() == 10);
    CHECK(h.d_loss.size() == 5);
    CHECK(h.d_prob_real.size() == 5);
    for (double p : h.d_prob_real) {
        CHECK(p > 0.0);
        CHECK(p < 1.0);
    }

    ReconNetModel two = fresh_model(0.01, 2, 76);
    CHECK_THROWS(train_adversarial(two, disc, train, cfg));
}

TEST_CASE("train_adversarial: lambda_adv 0 matches Euclidean Adam updates bitwise") {
    MeasurementMatrix phi = gen_gaussian_orthonormal(kBlockPixels, 0.01, 81);
    auto train = random_pairs(phi, 10, 82);

    GanConfig gcfg;
    gcfg.lambda_adv = 0.0;
    gcfg.iterations = 1;  // 2 G updates before the first D batch is drawn
    gcfg.batch_size = 3;
    gcfg.lr_g = 1e-3;
    gcfg.seed = 83;
    ReconNetModel gen = fresh_model(0.01, 1, 84);
    Prng drng(85);
    Discriminator disc = build_discriminator(drng);
    GanHistory h = train_adversarial(gen, disc, train, gcfg);

    TrainConfig cfg;
    cfg.batch_size = 3;
    cfg.iterations = 2;
    cfg.optimizer = OptKind::Adam;
    cfg.learning_rate = 1e-3;
    cfg.seed = 83;
    ReconNetModel euc = fresh_model(0.01, 1, 84);
    auto history = train_euclidean(euc, train, cfg);

    CHECK(params_bitwise_equal(gen, euc));
    REQUIRE(h.g_rec.size() == 2);
    CHECK(h.g_rec[0] == history[0]);
    CHECK(h.g_rec[1] == history[1]);
}

TEST_CASE("train_autoencoder: identity is reachable at full measurement rate") {
    std::vector<Sample> train;
    for (int i = 0; i < 5; ++i) {
        Tensor p = smooth_patch(100 + static_cast<std::uint64_t>(i));
        train.push_back(Sample{p, p});
    }

    Prng rng(93);
    Encoder enc = build_encoder(kBlockPixels, rng);
    ReconNetModel dec = fresh_model(1.0, 1, 94);

    TrainConfig cfg;
    cfg.batch_size = 5;
    cfg.iterations = 200;
    cfg.optimizer = OptKind::Adam;
    cfg.learning_rate = 1e-3;
    cfg.seed = 95;
    auto history = train_autoencoder(enc, dec, train, cfg);
    CHECK(history.back() < history.front() / 100.0);

    // exported matrix reproduces the encoder exactly
    MeasurementMatrix learned = enc.export_phi(1.0);
    Tensor y0 = enc.forward(train[0].input);
    Tensor ys = sense(learned, train[0].input);
    for (std::size_t i = 0; i < y0.numel(); ++i) CHECK(ys[i] == y0[i]);
}

TEST_CASE("finetune_fc: convolutions frozen bitwise, fc retrained for the new rate") {
    MeasurementMatrix phi25 = gen_gaussian_orthonormal(kBlockPixels, 0.25, 101);
    MeasurementMatrix phi10 = gen_gaussian_orthonormal(kBlockPixels, 0.10, 102);
    ReconNetModel base = fresh_model(0.25, 1, 103);
    auto train = random_pairs(phi10, 6, 104);
    TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.iterations = 10;
    cfg.learning_rate = 1e-3;
    cfg.seed = 105;
    ReconNetModel tuned = finetune_fc(base, phi10, train, cfg);

    CHECK(tuned.m == 109);
    CHECK(tuned.fc.W.extent(1) == 109);
    REQUIRE(tuned.convs.size() == base.convs.size());
    for (std::size_t i = 0; i < base.convs.size(); ++i) {
        for (std::size_t j = 0; j < base.convs[i].k.numel(); ++j)
            CHECK(tuned.convs[i].k[j] == base.convs[i].k[j]);
        for (std::size_t j = 0; j < base.convs[i].b.numel(); ++j)
            CHECK(tuned.convs[i].b[j] == base.convs[i].b[j]);
    }

    // circulant base models are rejected
    Prng rng(106);
    ReconNetSpec spec;
    spec.mr = 0.25;
    spec.first_stage = FirstStage::CirculantBank;
    ReconNetModel circ = build_reconnet(spec, FcInit{}, rng);
    CHECK_THROWS(finetune_fc(circ, phi10, train, cfg));
}

TEST_CASE("select_by_validation: zero-loss candidate wins, ties keep the earliest") {
    MeasurementMatrix phi = gen_gaussian_orthonormal(kBlockPixels, 0.01, 111);
    ReconNetModel oracle = fresh_model(0.01, 1, 112);
    ReconNetModel other = fresh_model(0.01, 1, 113);

    // valset targets are the oracle's own outputs -> zero loss for it
    std::vector<Sample> valset;
    Prng rng(114);
    for (int i = 0; i < 3; ++i) {
        Tensor y({oracle.m});
        gaussian_fill(y, 0.0, 1.0, rng);
        Tensor pred = oracle.forward(y);
        valset.push_back(Sample{y, pred.reshaped({kBlockPixels})});
    }
    CHECK(select_by_validation({&other, &oracle}, valset) == 1);
    CHECK(select_by_validation({&oracle, &other}, valset) == 0);
    CHECK(select_by_validation({&other, &other}, valset) == 0);
    CHECK(select_by_validation({&oracle}, valset) == 0);
    CHECK_THROWS(select_by_validation({}, valset));
}

TEST_CASE("loss CSV writers produce the documented headers") {
    write_loss_csv("loss_test.csv", {1.5, 0.75});
    std::ifstream in("loss_test.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "iteration,loss");
    std::getline(in, line);
    CHECK(line == "0,1.5");
    in.close();
    std::remove("loss_test.csv");

    GanHistory h;
    h.g_loss = {1.0, 0.9};
    h.g_adv = {0.5, 0.4};
    h.d_loss = {1.2};
    write_gan_loss_csv("gan_test.csv", h);
    std::ifstream gin("gan_test.csv");
    std::getline(gin, line);
    CHECK(line == "iteration,loss,d_loss,g_adv_loss");
    gin.close();
    std::remove("gan_test.csv");
}
