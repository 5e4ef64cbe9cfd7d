#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcn/tensor.hpp"

namespace rcn {

struct GrayImage {
    std::size_t height = 0, width = 0;
    std::vector<double> pixels;  // row-major, values in [0,1]

    double& at(std::size_t y, std::size_t x) { return pixels[y * width + x]; }
    double at(std::size_t y, std::size_t x) const { return pixels[y * width + x]; }
};

// Binary PGM (P5), maxval <= 255. Reading maps v to v/255; writing
// rounds half away from zero back to the 8-bit grid.
GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& img, const std::string& path);

// BT.601 luminance; inputs outside [0,1] are clamped with a warning on
// stderr.
double rgb_to_luma(double r, double g, double b);

enum class Split : std::uint8_t { Train = 0, Val = 1 };

struct Patch {
    Tensor t;  // [33 x 33]
    std::string source;
    std::uint32_t x0 = 0, y0 = 0;
    Split split = Split::Train;
};

struct PatchDataset {
    std::size_t patch_side = 33;
    std::vector<Patch> patches;

    std::size_t count(Split s) const;
};

PatchDataset extract_patches(const GrayImage& img, const std::string& source,
                             std::size_t size = 33, std::size_t stride = 14);

void append(PatchDataset& ds, const PatchDataset& more);

// Container layout: magic "RCD1", u32 version, u32 patch count, u16
// patch side, then per patch (u32 source length + UTF-8, u32 x0, u32 y0,
// u8 split tag, side^2 little-endian f32 payload).
void save_dataset(const PatchDataset& ds, const std::string& path);
PatchDataset load_dataset(const std::string& path);

// Deterministic shuffled split; tags are set in place.
void split_train_val(PatchDataset& ds, double val_fraction, std::uint64_t seed);

}  // namespace rcn
