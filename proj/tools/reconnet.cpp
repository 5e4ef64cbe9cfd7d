#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "rcn/evalkit.hpp"
#include "rcn/training.hpp"

namespace fs = std::filesystem;
using namespace rcn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitUsage = 64;

std::vector<std::string> list_pgms(const std::string& dir) {
    std::vector<std::string> files;
    if (!fs::is_directory(dir))
        throw std::runtime_error("not a directory: '" + dir + "'");
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".pgm")
            files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    return files;
}

struct LoadedModel {
    ReconNetModel model;
    MeasurementMatrix phi;
    std::string variant;
};

LoadedModel load_model_with_variant(const std::string& path) {
    Checkpoint ck = load_checkpoint_file(path);
    auto [model, phi] = model_from_checkpoint(ck);
    const std::string* v = ck.find_meta("variant");
    return LoadedModel{std::move(model), std::move(phi), v ? *v : "euc"};
}

void save_model_with_variant(const ReconNetModel& model, const MeasurementMatrix& phi,
                             const std::string& variant, const std::string& path) {
    Checkpoint ck = model_to_checkpoint(model, phi);
    ck.metadata.emplace_back("variant", variant);
    save_checkpoint_file(ck, path);
}

int cmd_make_dataset(const std::string& images_dir, const std::string& out,
                     std::size_t stride, double val_frac, std::uint64_t seed) {
    auto files = list_pgms(images_dir);
    if (files.empty()) {
        std::cerr << "error: no .pgm images in '" << images_dir << "'\n";
        return kExitInput;
    }
    PatchDataset ds;
    for (const auto& f : files) {
        GrayImage img = read_pgm(f);
        append(ds, extract_patches(img, fs::path(f).filename().string(), 33, stride));
    }
    split_train_val(ds, val_frac, seed);
    save_dataset(ds, out);
    std::cout << ds.patches.size() << " patches (" << ds.count(Split::Train)
              << " train, " << ds.count(Split::Val) << " val) from " << files.size()
              << " images -> " << out << "\n";
    return kExitOk;
}

int cmd_train(const std::string& variant, double mr, const std::string& dataset_path,
              const std::string& out, int circulant, std::size_t iters,
              std::uint64_t seed, const std::string& fc_init, std::size_t batch,
              double lr) {
    PatchDataset ds = load_dataset(dataset_path);
    Prng rng(seed);

    TrainConfig cfg;
    cfg.batch_size = batch;
    cfg.iterations = iters;
    cfg.learning_rate = lr;
    cfg.seed = seed;

    if (variant == "euc") {
        ReconNetSpec spec;
        spec.mr = mr;
        spec.n_units = 2;
        if (circulant > 0) {
            spec.first_stage = FirstStage::CirculantBank;
            spec.gamma = circulant;
        }
        MeasurementMatrix phi = gen_gaussian_orthonormal(kBlockPixels, mr, seed);
        FcInit init;
        if (spec.first_stage == FirstStage::Fc && fc_init == "phit") {
            init.kind = FcInit::FromPhiTranspose;
            init.phi = &phi;
        }
        ReconNetModel model = build_reconnet(spec, init, rng);
        auto train = make_training_pairs(ds, phi, Split::Train);
        auto history = train_euclidean(model, train, cfg);
        save_model_with_variant(model, phi, variant, out);
        write_loss_csv(out + ".loss.csv", history);
        std::cout << "trained " << variant << " (mr " << mr << ", "
                  << history.size() << " iterations, final loss "
                  << history.back() << ") -> " << out << "\n";
        return kExitOk;
    }

    if (variant == "euc-adv") {
        ReconNetSpec spec;
        spec.mr = mr;
        spec.n_units = 1;
        if (circulant > 0) {
            spec.first_stage = FirstStage::CirculantBank;
            spec.gamma = circulant;
        }
        MeasurementMatrix phi = gen_gaussian_orthonormal(kBlockPixels, mr, seed);
        FcInit init;
        if (spec.first_stage == FirstStage::Fc && fc_init == "phit") {
            init.kind = FcInit::FromPhiTranspose;
            init.phi = &phi;
        }
        ReconNetModel gen = build_reconnet(spec, init, rng);
        Discriminator disc = build_discriminator(rng);
        GanConfig gcfg;
        gcfg.iterations = iters;
        gcfg.batch_size = batch;
        gcfg.lr_g = lr;
        gcfg.seed = seed;
        auto train = make_training_pairs(ds, phi, Split::Train);
        GanHistory h = train_adversarial(gen, disc, train, gcfg);
        save_model_with_variant(gen, phi, variant, out);
        write_gan_loss_csv(out + ".loss.csv", h);
        std::cout << "trained " << variant << " (mr " << mr << ", G updates "
                  << h.g_updates << ", D updates " << h.d_updates << ") -> " << out
                  << "\n";
        return kExitOk;
    }

    if (variant == "euc-learnphi" || variant == "euc-adv-learnphi") {
        const bool adversarial = variant == "euc-adv-learnphi";
        ReconNetSpec spec;
        spec.mr = mr;
        spec.n_units = adversarial ? 1 : 2;
        ReconNetModel decoder = build_reconnet(spec, FcInit{}, rng);
        Encoder encoder = build_encoder(decoder.m, rng);
        auto train = make_autoencoder_pairs(ds, Split::Train);
        if (adversarial) {
            Discriminator disc = build_discriminator(rng);
            GanConfig gcfg;
            gcfg.iterations = iters;
            gcfg.batch_size = batch;
            gcfg.lr_g = lr;
            gcfg.seed = seed;
            GanHistory h = train_adversarial(decoder, disc, train, gcfg, &encoder);
            write_gan_loss_csv(out + ".loss.csv", h);
        } else {
            cfg.optimizer = OptKind::Adam;
            auto history = train_autoencoder(encoder, decoder, train, cfg);
            write_loss_csv(out + ".loss.csv", history);
        }
        MeasurementMatrix phi = encoder.export_phi(mr);
        save_model_with_variant(decoder, phi, variant, out);
        std::cout << "trained " << variant << " (mr " << mr
                  << ", learned measurement matrix " << phi.m << "x" << phi.n
                  << ") -> " << out << "\n";
        return kExitOk;
    }

    std::cerr << "error: unknown variant '" << variant << "'\n";
    return kExitUsage;
}

int cmd_finetune_fc(const std::string& base_path, double mr,
                    const std::string& dataset_path, const std::string& out,
                    std::size_t iters, std::uint64_t seed, std::size_t batch,
                    double lr) {
    LoadedModel base = load_model_with_variant(base_path);
    if (base.model.spec.first_stage != FirstStage::Fc) {
        std::cerr << "error: base checkpoint has a circulant first stage; "
                     "fc fine-tuning requires an fc first stage\n";
        return kExitInput;
    }
    PatchDataset ds = load_dataset(dataset_path);
    MeasurementMatrix new_phi = gen_gaussian_orthonormal(kBlockPixels, mr, seed);
    TrainConfig cfg;
    cfg.iterations = iters;
    cfg.seed = seed;
    cfg.batch_size = batch;
    cfg.learning_rate = lr;
    auto train = make_training_pairs(ds, new_phi, Split::Train);
    ReconNetModel tuned = finetune_fc(base.model, new_phi, train, cfg);
    save_model_with_variant(tuned, new_phi, base.variant + "-ft", out);
    std::cout << "fine-tuned fc layer to mr " << mr << " (" << iters
              << " iterations) -> " << out << "\n";
    return kExitOk;
}

int cmd_reconstruct(const std::string& model_path, const std::string& input,
                    const std::string& output, double sigma, std::uint64_t seed) {
    LoadedModel lm = load_model_with_variant(model_path);
    GrayImage img = read_pgm(input);
    auto [recon, secs] = reconstruct_image(lm.model, lm.phi, img, NoiseSpec{sigma},
                                           seed);
    write_pgm(recon, output);
    std::cout << "psnr_db=" << psnr(img, recon) << " seconds=" << secs << "\n";
    return kExitOk;
}

int cmd_eval(const std::vector<std::string>& model_paths, const std::string& testdir,
             const std::string& out, const std::vector<double>& sigmas,
             std::uint64_t seed) {
    std::vector<LoadedModel> loaded;
    for (const auto& p : model_paths) loaded.push_back(load_model_with_variant(p));
    std::vector<EvalModel> models;
    for (const auto& lm : loaded)
        models.push_back(EvalModel{&lm.model, &lm.phi, lm.variant});
    std::vector<std::pair<std::string, GrayImage>> images;
    for (const auto& f : list_pgms(testdir))
        images.emplace_back(fs::path(f).filename().string(), read_pgm(f));
    if (images.empty()) {
        std::cerr << "error: no .pgm images in '" << testdir << "'\n";
        return kExitInput;
    }
    EvalReport report = run_eval(models, images, sigmas, seed, out);
    std::cout << report.rows.size() << " rows -> " << out << "\n";
    return kExitOk;
}

int cmd_bench(const std::string& model_path, std::size_t side, std::size_t repeats) {
    LoadedModel lm = load_model_with_variant(model_path);
    const double secs = bench(lm.model, lm.phi, side, repeats);
    std::cout << "median_seconds=" << secs << " (side " << side << ", " << repeats
              << " repeats)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block compressive-sensing reconstruction toolkit"};
    app.require_subcommand(1);

    // make-dataset
    auto* mk = app.add_subcommand("make-dataset", "Extract 33x33 patches from images");
    std::string mk_images, mk_out;
    std::size_t mk_stride = 14;
    double mk_val_frac = 0.1;
    std::uint64_t mk_seed = 1;
    mk->add_option("--images", mk_images, "Directory of .pgm images")->required();
    mk->add_option("--out", mk_out, "Output dataset file")->required();
    mk->add_option("--stride", mk_stride, "Extraction stride");
    mk->add_option("--val-frac", mk_val_frac, "Validation fraction")
        ->check(CLI::Range(0.0, 0.999));
    mk->add_option("--seed", mk_seed, "Split seed");

    // train
    auto* tr = app.add_subcommand("train", "Train a ReconNet variant");
    std::string tr_variant, tr_dataset, tr_out, tr_fc_init = "phit";
    double tr_mr = 0.25, tr_lr = 1e-3;
    int tr_circulant = 0;
    std::size_t tr_iters = 10000, tr_batch = 128;
    std::uint64_t tr_seed = 1;
    tr->add_option("--variant", tr_variant, "euc | euc-adv | euc-learnphi | euc-adv-learnphi")
        ->required()
        ->check(CLI::IsMember({"euc", "euc-adv", "euc-learnphi", "euc-adv-learnphi"}));
    tr->add_option("--mr", tr_mr, "Measurement rate")->required();
    tr->add_option("--dataset", tr_dataset, "Dataset file")->required();
    tr->add_option("--out", tr_out, "Output checkpoint")->required();
    tr->add_option("--circulant", tr_circulant, "Circulant bank width (gamma)");
    tr->add_option("--iters", tr_iters, "Training iterations");
    tr->add_option("--seed", tr_seed, "Run seed");
    tr->add_option("--fc-init", tr_fc_init, "FC init: random | phit")
        ->check(CLI::IsMember({"random", "phit"}));
    tr->add_option("--batch", tr_batch, "Mini-batch size");
    tr->add_option("--lr", tr_lr, "Learning rate");

    // finetune-fc
    auto* ft = app.add_subcommand("finetune-fc", "Retrain only the FC layer for a new matrix");
    std::string ft_base, ft_dataset, ft_out;
    double ft_mr = 0.25, ft_lr = 1e-3;
    std::size_t ft_iters = 1000, ft_batch = 128;
    std::uint64_t ft_seed = 1;
    ft->add_option("--base", ft_base, "Base checkpoint")->required();
    ft->add_option("--mr", ft_mr, "Target measurement rate")->required();
    ft->add_option("--dataset", ft_dataset, "Dataset file")->required();
    ft->add_option("--out", ft_out, "Output checkpoint")->required();
    ft->add_option("--iters", ft_iters, "Fine-tune iterations");
    ft->add_option("--seed", ft_seed, "Run seed");
    ft->add_option("--batch", ft_batch, "Mini-batch size");
    ft->add_option("--lr", ft_lr, "Learning rate");

    // reconstruct
    auto* rc = app.add_subcommand("reconstruct", "Reconstruct one image");
    std::string rc_model, rc_input, rc_output;
    double rc_sigma = 0.0;
    std::uint64_t rc_seed = 1;
    rc->add_option("--model", rc_model, "Model checkpoint")->required();
    rc->add_option("--input", rc_input, "Input .pgm image")->required();
    rc->add_option("--output", rc_output, "Output .pgm image")->required();
    rc->add_option("--sigma", rc_sigma, "Measurement noise sigma on the 0-255 range");
    rc->add_option("--seed", rc_seed, "Noise seed");

    // eval
    auto* ev = app.add_subcommand("eval", "PSNR/timing sweep over a test directory");
    std::vector<std::string> ev_models;
    std::string ev_testdir, ev_out;
    std::vector<double> ev_sigmas{0.0, 10.0, 20.0, 30.0};
    std::uint64_t ev_seed = 1;
    ev->add_option("--models", ev_models, "Model checkpoints")->required();
    ev->add_option("--testdir", ev_testdir, "Directory of test .pgm images")->required();
    ev->add_option("--out", ev_out, "Output CSV")->required();
    ev->add_option("--sigmas", ev_sigmas, "Noise levels on the 0-255 range");
    ev->add_option("--seed", ev_seed, "Noise seed");

    // bench
    auto* bn = app.add_subcommand("bench", "Reconstruction timing benchmark");
    std::string bn_model;
    std::size_t bn_side = 256, bn_repeats = 11;
    bn->add_option("--model", bn_model, "Model checkpoint")->required();
    bn->add_option("--side", bn_side, "Square image side");
    bn->add_option("--repeats", bn_repeats, "Timing repeats (>= 3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (mk->parsed())
            return cmd_make_dataset(mk_images, mk_out, mk_stride, mk_val_frac, mk_seed);
        if (tr->parsed())
            return cmd_train(tr_variant, tr_mr, tr_dataset, tr_out, tr_circulant,
                             tr_iters, tr_seed, tr_fc_init, tr_batch, tr_lr);
        if (ft->parsed())
            return cmd_finetune_fc(ft_base, ft_mr, ft_dataset, ft_out, ft_iters,
                                   ft_seed, ft_batch, ft_lr);
        if (rc->parsed())
            return cmd_reconstruct(rc_model, rc_input, rc_output, rc_sigma, rc_seed);
        if (ev->parsed())
            return cmd_eval(ev_models, ev_testdir, ev_out, ev_sigmas, ev_seed);
        if (bn->parsed()) {
            if (bn_repeats < 3) {
                std::cerr << "error: --repeats must be >= 3\n";
                return kExitUsage;
            }
            return cmd_bench(bn_model, bn_side, bn_repeats);
        }
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}
