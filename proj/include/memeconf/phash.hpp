#pragma once

#include "memeconf/image.hpp"

#include <bit>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memeconf {

/// 64-bit DCT sign code. Bit i covers coefficient (i / 8, i % 8) of the
/// top-left 8x8 block of the 32x32 DCT; bit 0 is the DC term and is always 0.
struct PerceptualHash {
    std::uint64_t bits = 0;

    auto operator<=>(const PerceptualHash&) const = default;

    /// 16 lowercase hex digits, most significant first.
    std::string hex() const;
    static PerceptualHash from_hex(std::string_view text);
};

inline int hamming(PerceptualHash a, PerceptualHash b) noexcept
{
    return std::popcount(a.bits ^ b.bits);
}

inline constexpr std::size_t kHashResizeSide = 32;
inline constexpr std::size_t kHashBlockSide = 8;

/// Orthonormal 2-D DCT-II of a square matrix.
Matrix dct2(const Matrix& m);

/// grayscale -> 32x32 area resize -> DCT-II -> 8x8 low block -> sign vs.
/// median of the 63 AC coefficients. Throws Errc::degenerate below 8x8.
PerceptualHash phash(const GrayImage& img);

// Batch kernels. hash_images runs under OpenMP; the serial version is the
// reference the tests compare it against.
std::vector<PerceptualHash> hash_images(std::span<const GrayImage> images);
std::vector<PerceptualHash> hash_images_serial(std::span<const GrayImage> images);

} // namespace memeconf
