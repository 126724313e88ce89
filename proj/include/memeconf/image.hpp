#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace memeconf {

/// Dense row-major matrix of doubles. Grayscale images use it directly.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool operator==(const Matrix&) const = default;
};

using GrayImage = Matrix;

/// Interleaved multi-channel raster (H x W x C).
struct Raster {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 1;
    std::vector<double> data;

    double operator()(std::size_t r, std::size_t c, std::size_t ch) const
    {
        return data[(r * width + c) * channels + ch];
    }
};

/// C=1 passes through; C=3 uses luma weights (0.299, 0.587, 0.114).
GrayImage to_grayscale(const Raster& img);

/// Area-averaging resize to side x side. Each output cell is the
/// overlap-weighted mean of the input pixels it covers.
GrayImage resize_area(const GrayImage& m, std::size_t side);

/// Reads binary PGM (P5) or PPM (P6, converted via luma). 8-bit only.
GrayImage read_pnm(const std::filesystem::path& path);

/// Writes binary PGM (P5, maxval 255). Values are rounded and clamped to [0, 255].
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

} // namespace memeconf
