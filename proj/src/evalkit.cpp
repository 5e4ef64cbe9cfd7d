#include "rcn/evalkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcn {

namespace {

// Symmetric reflection without edge duplication, repeated for any
// overshoot (period 2n-2).
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
    if (n == 1) return 0;
    const std::ptrdiff_t period = 2 * static_cast<std::ptrdiff_t>(n) - 2;
    i = ((i % period) + period) % period;
    if (i >= static_cast<std::ptrdiff_t>(n)) i = period - i;
    return static_cast<std::size_t>(i);
}

}  // namespace

std::pair<std::vector<Tensor>, TileGeometry> tile_blocks(const GrayImage& img) {
    if (img.height == 0 || img.width == 0)
        throw std::invalid_argument("tile_blocks: empty image");
    TileGeometry geom;
    geom.height = img.height;
    geom.width = img.width;
    geom.rows = (img.height + kBlockSide - 1) / kBlockSide;
    geom.cols = (img.width + kBlockSide - 1) / kBlockSide;
    geom.padded_h = geom.rows * kBlockSide;
    geom.padded_w = geom.cols * kBlockSide;
    std::vector<Tensor> blocks;
    blocks.reserve(geom.rows * geom.cols);
    for (std::size_t br = 0; br < geom.rows; ++br)
        for (std::size_t bc = 0; bc < geom.cols; ++bc) {
            Tensor b({kBlockSide, kBlockSide});
            for (std::size_t y = 0; y < kBlockSide; ++y)
                for (std::size_t x = 0; x < kBlockSide; ++x) {
                    const std::size_t sy = reflect_index(
                        static_cast<std::ptrdiff_t>(br * kBlockSide + y), img.height);
                    const std::size_t sx = reflect_index(
                        static_cast<std::ptrdiff_t>(bc * kBlockSide + x), img.width);
                    b.at(y, x) = img.at(sy, sx);
                }
            blocks.push_back(std::move(b));
        }
    return {std::move(blocks), geom};
}

GrayImage stitch_blocks(const std::vector<Tensor>& blocks, const TileGeometry& geom) {
    if (blocks.size() != geom.rows * geom.cols)
        throw std::invalid_argument("stitch_blocks: block count mismatch");
    GrayImage img;
    img.height = geom.height;
    img.width = geom.width;
    img.pixels.assign(geom.height * geom.width, 0.0);
    for (std::size_t br = 0; br < geom.rows; ++br)
        for (std::size_t bc = 0; bc < geom.cols; ++bc) {
            const Tensor& b = blocks[br * geom.cols + bc];
            for (std::size_t y = 0; y < kBlockSide; ++y) {
                const std::size_t iy = br * kBlockSide + y;
                if (iy >= geom.height) break;
                for (std::size_t x = 0; x < kBlockSide; ++x) {
                    const std::size_t ix = bc * kBlockSide + x;
                    if (ix >= geom.width) break;
                    img.at(iy, ix) = std::clamp(b.at(y, x), 0.0, 1.0);
                }
            }
        }
    return img;
}

std::pair<GrayImage, double> reconstruct_image(const ReconNetModel& model,
                                               const MeasurementMatrix& phi,
                                               const GrayImage& img,
                                               const NoiseSpec& noise,
                                               std::uint64_t seed) {
    if (model.m != phi.m)
        throw std::invalid_argument("reconstruct_image: model/phi measurement mismatch");
    auto [blocks, geom] = tile_blocks(img);
    std::vector<Tensor> recon(blocks.size());
    const auto t0 = std::chrono::steady_clock::now();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks.size()); ++b) {
        Tensor x = blocks[b].reshaped({kBlockPixels});
        Tensor y = sense(phi, x);
        Prng rng(Prng::substream_seed(seed, static_cast<std::uint64_t>(b)));
        y = add_noise(y, noise, rng);
        recon[b] = model.forward(y);
    }
    const auto t1 = std::chrono::steady_clock::now();
    return {stitch_blocks(recon, geom), std::chrono::duration<double>(t1 - t0).count()};
}

double psnr(const GrayImage& a, const GrayImage& b, double peak) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument("psnr: dimension mismatch");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = a.pixels[i] - b.pixels[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.pixels.size());
    if (mse == 0.0) return kPsnrInf;
    return 10.0 * std::log10(peak * peak / mse);
}

EvalReport run_eval(const std::vector<EvalModel>& models,
                    const std::vector<std::pair<std::string, GrayImage>>& images,
                    const std::vector<double>& sigmas, std::uint64_t seed,
                    const std::string& out_csv) {
    if (models.empty()) throw std::invalid_argument("run_eval: no models");
    EvalReport report;
    std::uint64_t row_counter = 0;
    for (const auto& [name, img] : images)
        for (const EvalModel& em : models)
            for (double sigma : sigmas) {
                const std::uint64_t row_seed = Prng::substream_seed(seed, row_counter++);
                auto [recon, secs] = reconstruct_image(*em.model, *em.phi, img,
                                                       NoiseSpec{sigma}, row_seed);
                EvalRow row;
                row.image = name;
                row.mr = em.phi->mr;
                row.sigma = sigma;
                row.variant = em.variant;
                row.psnr_db = psnr(img, recon);
                row.seconds = secs;
                report.rows.push_back(std::move(row));
            }
    if (!out_csv.empty()) write_eval_csv(report, out_csv);
    return report;
}

void write_eval_csv(const EvalReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_eval_csv: cannot open '" + path + "'");
    os << "image,mr,sigma,variant,psnr_db,seconds\n";
    for (const EvalRow& r : report.rows) {
        std::ostringstream line;
        line << r.image << "," << r.mr << "," << r.sigma << "," << r.variant << ",";
        if (std::isinf(r.psnr_db))
            line << "inf";
        else
            line << r.psnr_db;
        line << "," << r.seconds << "\n";
        os << line.str();
    }
}

double bench(const ReconNetModel& model, const MeasurementMatrix& phi,
             std::size_t image_side, std::size_t repeats) {
    if (repeats < 3) throw std::invalid_argument("bench: repeats must be >= 3");
    GrayImage img;
    img.height = img.width = image_side;
    img.pixels.resize(image_side * image_side);
    for (std::size_t y = 0; y < image_side; ++y)
        for (std::size_t x = 0; x < image_side; ++x)
            img.at(y, x) =
                0.5 + 0.5 * std::sin(0.05 * static_cast<double>(x)) *
                          std::cos(0.07 * static_cast<double>(y));
    for (double& v : img.pixels) v = std::clamp(v, 0.0, 1.0);
    std::vector<double> times;
    times.reserve(repeats);
    for (std::size_t r = 0; r < repeats; ++r)
        times.push_back(reconstruct_image(model, phi, img, NoiseSpec{0.0}, 0).second);
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

}  // namespace rcn
