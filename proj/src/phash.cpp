#include "memeconf/phash.hpp"

#include "memeconf/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>

namespace memeconf {

std::string PerceptualHash::hex() const
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i)
        out[15 - i] = digits[(bits >> (4 * i)) & 0xF];
    return out;
}

PerceptualHash PerceptualHash::from_hex(std::string_view text)
{
    std::uint64_t v = 0;
    if (text.size() != 16)
        throw Error(Errc::parse, "hash must be 16 hex digits: '" + std::string(text) + "'");
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, 16);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw Error(Errc::parse, "bad hash hex '" + std::string(text) + "'");
    return PerceptualHash{v};
}

namespace {

// basis(k, i) = alpha(k) * cos(pi * (2i + 1) * k / (2n))
Matrix dct_basis(std::size_t n)
{
    Matrix b(n, n);
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double alpha = k == 0 ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn);
        for (std::size_t i = 0; i < n; ++i)
            b(k, i) = alpha * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * nn));
    }
    return b;
}

const Matrix& cached_basis(std::size_t n)
{
    static const Matrix hash_basis = dct_basis(kHashResizeSide);
    if (n == kHashResizeSide)
        return hash_basis;
    thread_local Matrix other;
    if (other.rows != n)
        other = dct_basis(n);
    return other;
}

} // namespace

Matrix dct2(const Matrix& m)
{
    if (m.rows != m.cols || m.rows == 0)
        throw Error(Errc::invalid_argument, "dct2 needs a non-empty square matrix");
    const std::size_t n = m.rows;
    const Matrix& b = cached_basis(n);

    // out = B * M * B^T
    Matrix tmp(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            const double w = b(k, i);
            for (std::size_t j = 0; j < n; ++j)
                tmp(k, j) += w * m(i, j);
        }
    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                acc += tmp(k, j) * b(l, j);
            out(k, l) = acc;
        }
    return out;
}

PerceptualHash phash(const GrayImage& img)
{
    if (img.rows < kHashBlockSide || img.cols < kHashBlockSide)
        throw Error(Errc::degenerate, "image smaller than 8x8 cannot be hashed");

    GrayImage small = resize_area(img, kHashResizeSide);

    // Mean removal only moves the DC term, which is never a hash bit.
    double mean = 0.0;
    for (double v : small.data)
        mean += v;
    mean /= static_cast<double>(small.data.size());
    const auto [lo, hi] = std::minmax_element(small.data.begin(), small.data.end());
    if (*hi - *lo <= 1e-9 * std::max(1.0, std::abs(mean)))
        return PerceptualHash{0}; // flat image: every AC coefficient is zero
    for (double& v : small.data)
        v -= mean;

    const Matrix coeffs = dct2(small);

    std::array<double, kHashBlockSide * kHashBlockSide> block{};
    for (std::size_t u = 0; u < kHashBlockSide; ++u)
        for (std::size_t v = 0; v < kHashBlockSide; ++v)
            block[u * kHashBlockSide + v] = coeffs(u, v);

    std::array<double, block.size() - 1> ac{};
    std::copy(block.begin() + 1, block.end(), ac.begin());
    // Lower median; 63 is odd so this is the exact middle element.
    auto mid = ac.begin() + (ac.size() - 1) / 2;
    std::nth_element(ac.begin(), mid, ac.end());
    const double median = *mid;

    std::uint64_t bits = 0;
    for (std::size_t i = 1; i < block.size(); ++i)
        if (block[i] > median)
            bits |= std::uint64_t{1} << i;
    return PerceptualHash{bits};
}

std::vector<PerceptualHash> hash_images_serial(std::span<const GrayImage> images)
{
    std::vector<PerceptualHash> out;
    out.reserve(images.size());
    for (const auto& img : images)
        out.push_back(phash(img));
    return out;
}

std::vector<PerceptualHash> hash_images(std::span<const GrayImage> images)
{
    std::vector<PerceptualHash> out(images.size());
    const auto n = static_cast<std::ptrdiff_t>(images.size());
    // Exceptions must not escape the parallel region; keep the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = phash(images[i]);
        } catch (...) {
#pragma omp critical
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

} // namespace memeconf
