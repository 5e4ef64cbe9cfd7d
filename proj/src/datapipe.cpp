#include "rcn/datapipe.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "rcn/prng.hpp"

namespace rcn {

namespace {

int next_header_token(std::istream& is) {
    // Skips whitespace and '#' comments, returns a non-negative integer.
    while (is) {
        int c = is.peek();
        if (c == '#') {
            std::string line;
            std::getline(is, line);
        } else if (std::isspace(c)) {
            is.get();
        } else {
            break;
        }
    }
    int v = -1;
    is >> v;
    if (!is || v < 0) throw std::runtime_error("read_pgm: malformed header");
    return v;
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_pgm: cannot open '" + path + "'");
    char magic[2];
    is.read(magic, 2);
    if (!is || magic[0] != 'P' || magic[1] != '5')
        throw std::runtime_error("read_pgm: unsupported format in '" + path +
                                 "' (binary P5 required)");
    const int w = next_header_token(is);
    const int h = next_header_token(is);
    const int maxval = next_header_token(is);
    if (w <= 0 || h <= 0) throw std::runtime_error("read_pgm: bad dimensions");
    if (maxval <= 0 || maxval > 255)
        throw std::runtime_error("read_pgm: maxval must be in [1,255]");
    is.get();  // the single whitespace after maxval
    GrayImage img;
    img.width = static_cast<std::size_t>(w);
    img.height = static_cast<std::size_t>(h);
    std::vector<unsigned char> raw(img.width * img.height);
    is.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (!is) throw std::runtime_error("read_pgm: truncated payload in '" + path + "'");
    img.pixels.resize(raw.size());
    const double inv = 1.0 / static_cast<double>(maxval);
    for (std::size_t i = 0; i < raw.size(); ++i)
        img.pixels[i] = static_cast<double>(raw[i]) * inv;
    return img;
}

void write_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_pgm: cannot open '" + path + "'");
    os << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> raw(img.pixels.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double v = std::clamp(img.pixels[i], 0.0, 1.0);
        // round half away from zero
        raw[i] = static_cast<unsigned char>(std::floor(v * 255.0 + 0.5));
    }
    os.write(reinterpret_cast<const char*>(raw.data()),
             static_cast<std::streamsize>(raw.size()));
    if (!os) throw std::runtime_error("write_pgm: write failed for '" + path + "'");
}

double rgb_to_luma(double r, double g, double b) {
    auto clamp01 = [](double v, const char* ch) {
        if (v < 0.0 || v > 1.0) {
            std::cerr << "rgb_to_luma: clamping out-of-range " << ch << "=" << v << "\n";
            return std::clamp(v, 0.0, 1.0);
        }
        return v;
    };
    r = clamp01(r, "r");
    g = clamp01(g, "g");
    b = clamp01(b, "b");
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

std::size_t PatchDataset::count(Split s) const {
    std::size_t n = 0;
    for (const auto& p : patches)
        if (p.split == s) ++n;
    return n;
}

PatchDataset extract_patches(const GrayImage& img, const std::string& source,
                             std::size_t size, std::size_t stride) {
    if (img.height < size || img.width < size)
        throw std::invalid_argument("extract_patches: image smaller than patch");
    if (stride == 0) throw std::invalid_argument("extract_patches: zero stride");
    PatchDataset ds;
    ds.patch_side = size;
    for (std::size_t y0 = 0; y0 + size <= img.height; y0 += stride)
        for (std::size_t x0 = 0; x0 + size <= img.width; x0 += stride) {
            Patch p;
            p.t = Tensor({size, size});
            for (std::size_t y = 0; y < size; ++y)
                for (std::size_t x = 0; x < size; ++x)
                    p.t.at(y, x) = img.at(y0 + y, x0 + x);
            p.source = source;
            p.x0 = static_cast<std::uint32_t>(x0);
            p.y0 = static_cast<std::uint32_t>(y0);
            ds.patches.push_back(std::move(p));
        }
    return ds;
}

void append(PatchDataset& ds, const PatchDataset& more) {
    if (ds.patch_side != more.patch_side)
        throw std::invalid_argument("append: patch side mismatch");
    ds.patches.insert(ds.patches.end(), more.patches.begin(), more.patches.end());
}

namespace {

constexpr char kDsMagic[4] = {'R', 'C', 'D', '1'};

template <typename T>
void wle(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T rle(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("dataset: truncated file");
    return v;
}

}  // namespace

void save_dataset(const PatchDataset& ds, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_dataset: cannot open '" + path + "'");
    os.write(kDsMagic, 4);
    wle<std::uint32_t>(os, 1);
    wle<std::uint32_t>(os, static_cast<std::uint32_t>(ds.patches.size()));
    wle<std::uint16_t>(os, static_cast<std::uint16_t>(ds.patch_side));
    for (const auto& p : ds.patches) {
        wle<std::uint32_t>(os, static_cast<std::uint32_t>(p.source.size()));
        os.write(p.source.data(), static_cast<std::streamsize>(p.source.size()));
        wle<std::uint32_t>(os, p.x0);
        wle<std::uint32_t>(os, p.y0);
        wle<std::uint8_t>(os, static_cast<std::uint8_t>(p.split));
        for (std::size_t i = 0; i < p.t.numel(); ++i)
            wle<float>(os, static_cast<float>(p.t[i]));
    }
    if (!os) throw std::runtime_error("save_dataset: write failed");
}

PatchDataset load_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_dataset: cannot open '" + path + "'");
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kDsMagic, 4) != 0)
        throw std::runtime_error("load_dataset: bad magic in '" + path + "'");
    const auto version = rle<std::uint32_t>(is);
    if (version != 1)
        throw std::runtime_error("load_dataset: unsupported version " +
                                 std::to_string(version));
    const auto count = rle<std::uint32_t>(is);
    const auto side = rle<std::uint16_t>(is);
    if (side == 0) throw std::runtime_error("load_dataset: zero patch side");
    PatchDataset ds;
    ds.patch_side = side;
    ds.patches.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Patch p;
        const auto slen = rle<std::uint32_t>(is);
        p.source.resize(slen);
        is.read(p.source.data(), slen);
        if (!is) throw std::runtime_error("load_dataset: truncated source name");
        p.x0 = rle<std::uint32_t>(is);
        p.y0 = rle<std::uint32_t>(is);
        const auto tag = rle<std::uint8_t>(is);
        if (tag > 1) throw std::runtime_error("load_dataset: bad split tag");
        p.split = static_cast<Split>(tag);
        p.t = Tensor({static_cast<std::size_t>(side), static_cast<std::size_t>(side)});
        for (std::size_t j = 0; j < p.t.numel(); ++j)
            p.t[j] = static_cast<double>(rle<float>(is));
        ds.patches.push_back(std::move(p));
    }
    return ds;
}

void split_train_val(PatchDataset& ds, double val_fraction, std::uint64_t seed) {
    if (val_fraction < 0.0 || val_fraction >= 1.0)
        throw std::invalid_argument("split_train_val: fraction out of [0,1)");
    const std::size_t n = ds.patches.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Prng rng(seed);
    for (std::size_t i = n; i > 1; --i)
        std::swap(idx[i - 1], idx[rng.next_below(i)]);
    const auto nval = static_cast<std::size_t>(
        std::floor(val_fraction * static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i)
        ds.patches[idx[i]].split = i < nval ? Split::Val : Split::Train;
}

}  // namespace rcn
