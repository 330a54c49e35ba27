#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "anonet/dataset.hpp"

namespace anonet::data {

/// One handwritten digit: ordered pen coordinates with a digit label and a
/// writer id.
struct PenTrajectory {
    std::vector<std::array<double, 2>> points;  // (x, y), y up
    std::size_t digit = 0;
    std::size_t writer = 0;
    bool degenerate = false;  // all points identical; rendered as one pixel
};

constexpr std::size_t kRasterSize = 80;
constexpr std::size_t kImageSize = 20;

/// 80x80 binary raster: aspect-preserving min-max fit, centered, strokes
/// joined with Bresenham segments. The constraining axis touches the frame.
struct RasterImage {
    std::array<std::uint8_t, kRasterSize * kRasterSize> pixels{};
    bool degenerate = false;

    std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * kRasterSize + col]; }
};

RasterImage rasterize(const PenTrajectory& traj);

/// 4x4 block averaging to 20x20, flattened row-major into [0,1]^400.
std::vector<double> downsample(const RasterImage& img);

/// Full preprocessing of one trajectory into a 400-dim feature vector.
std::vector<double> preprocess(const PenTrajectory& traj);

/// Trajectories -> Dataset (y = digit, z = writer).
Dataset preprocess_all(const std::vector<PenTrajectory>& trajectories, std::size_t writer_count);

/// Reads a UNIPEN-style trajectory file: ".SEGMENT DIGIT <n> ? \"<d>\""
/// headers, ".PEN_DOWN"/".PEN_UP" stroke delimiters, one "x y" coordinate
/// pair per line. Writer ids come from ".COMMENT writer <n>" markers when
/// present, otherwise consecutive segments are grouped into writers of
/// `samples_per_writer` (0 keeps everything under writer 0).
std::vector<PenTrajectory> load_unipen(const std::string& path, std::size_t samples_per_writer = 0);

/// Synthetic stand-in for the pen-digits corpus: stroke templates for the
/// ten digits, one style per writer (slant, scale, curvature warp, jitter),
/// `samples_per_pair` trajectories per (digit, writer).
struct SurrogateSpec {
    std::size_t writers = 30;
    std::size_t samples_per_pair = 25;
    double style_strength = 1.0;
    double jitter = 0.01;
    std::uint64_t seed = 1;
};

std::vector<PenTrajectory> surrogate_pendigits(const SurrogateSpec& spec);

}  // namespace anonet::data
