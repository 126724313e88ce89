#pragma once

// Platform-stable random numbers. std::*_distribution output differs between
// standard libraries, so every draw here is derived from SplitMix64 directly.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <utility>
#include <vector>

namespace memeconf {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Hash an ordered tuple of keys into one 64-bit value (counter-based seeding).
inline std::uint64_t mix_keys(std::initializer_list<std::uint64_t> keys) noexcept
{
    std::uint64_t h = 0x6a09e667f3bcc908ULL;
    for (auto k : keys)
        h = splitmix64(h ^ splitmix64(k));
    return h;
}

/// Map 64 random bits to a double in [0, 1).
inline double unit_from_bits(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Standard normal from two independent 64-bit words (Box-Muller, cosine branch).
inline double normal_from_bits(std::uint64_t a, std::uint64_t b) noexcept
{
    const double u1 = 1.0 - unit_from_bits(a); // (0, 1]
    const double u2 = unit_from_bits(b);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() noexcept { return unit_from_bits(next()); }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) noexcept
    {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    double normal() noexcept
    {
        const auto a = next();
        const auto b = next();
        return normal_from_bits(a, b);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) noexcept
    {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::uint64_t state_;
};

} // namespace memeconf
