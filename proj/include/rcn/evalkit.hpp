#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rcn/datapipe.hpp"
#include "rcn/models.hpp"
#include "rcn/sensing.hpp"

namespace rcn {

struct TileGeometry {
    std::size_t height = 0, width = 0;    // original
    std::size_t padded_h = 0, padded_w = 0;  // multiples of 33
    std::size_t rows = 0, cols = 0;          // block grid
};

// Reflect-pads to multiples of 33 and cuts raster-ordered blocks.
std::pair<std::vector<Tensor>, TileGeometry> tile_blocks(const GrayImage& img);

// Raster reassembly, crop to the original size, clamp to [0,1].
GrayImage stitch_blocks(const std::vector<Tensor>& blocks, const TileGeometry& geom);

// Per block: sense -> add noise -> forward; noise uses a per-block
// substream of `seed` so serial and block-parallel runs agree bitwise.
// Returns the image and the wall-clock seconds of the forward phase.
std::pair<GrayImage, double> reconstruct_image(const ReconNetModel& model,
                                               const MeasurementMatrix& phi,
                                               const GrayImage& img,
                                               const NoiseSpec& noise,
                                               std::uint64_t seed);

inline constexpr double kPsnrInf = std::numeric_limits<double>::infinity();

double psnr(const GrayImage& a, const GrayImage& b, double peak = 1.0);

struct EvalRow {
    std::string image;
    double mr = 0.0;
    double sigma = 0.0;
    std::string variant;
    double psnr_db = 0.0;
    double seconds = 0.0;
};

struct EvalModel {
    const ReconNetModel* model;
    const MeasurementMatrix* phi;
    std::string variant;
};

struct EvalReport {
    std::vector<EvalRow> rows;
};

// Full image x model x sigma sweep in deterministic (image, mr, sigma)
// row order; writes the CSV when out_csv is non-empty.
EvalReport run_eval(const std::vector<EvalModel>& models,
                    const std::vector<std::pair<std::string, GrayImage>>& images,
                    const std::vector<double>& sigmas, std::uint64_t seed,
                    const std::string& out_csv);

void write_eval_csv(const EvalReport& report, const std::string& path);

// Median wall-clock seconds of the reconstruction forward phase on a
// synthetic image of the given side.
double bench(const ReconNetModel& model, const MeasurementMatrix& phi,
             std::size_t image_side, std::size_t repeats);

}  // namespace rcn
