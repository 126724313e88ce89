#include "memeconf/dataset.hpp"
#include "memeconf/error.hpp"
#include "memeconf/phash.hpp"
#include "memeconf/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <bit>

using namespace memeconf;

namespace {

Matrix random_matrix(Rng& rng, std::size_t n)
{
    Matrix m(n, n);
    for (double& v : m.data)
        v = rng.uniform(-100.0, 100.0);
    return m;
}

} // namespace

TEST_CASE("DCT of a constant has only a DC term")
{
    const Matrix c(8, 8, 3.5);
    const auto d = dct2(c);
    CHECK(d(0, 0) == doctest::Approx(3.5 * 8));
    for (std::size_t i = 1; i < d.data.size(); ++i)
        CHECK(std::abs(d.data[i]) < 1e-12);
}

TEST_CASE("DCT matches the definition")
{
    Matrix impulse(4, 4);
    impulse(0, 0) = 1.0;
    const auto d = dct2(impulse);
    const auto o = oracle::dct2(impulse);
    for (std::size_t i = 0; i < d.data.size(); ++i)
        CHECK(d.data[i] == doctest::Approx(o.data[i]).epsilon(1e-12));
    // Closed form: alpha(u) alpha(v) cos(pi u / 8) cos(pi v / 8).
    CHECK(d(1, 2) == doctest::Approx(std::sqrt(0.5) * std::sqrt(0.5) * std::cos(std::numbers::pi / 8) *
                                     std::cos(2 * std::numbers::pi / 8)));

    Rng rng(3);
    for (std::size_t n : {2u, 5u, 8u, 32u}) {
        const auto m = random_matrix(rng, n);
        const auto fast = dct2(m);
        const auto slow = oracle::dct2(m);
        for (std::size_t i = 0; i < fast.data.size(); ++i)
            CHECK(fast.data[i] == doctest::Approx(slow.data[i]).epsilon(1e-9).scale(100));
    }
}

TEST_CASE("orthonormal DCT preserves energy")
{
    Rng rng(17);
    const auto m = random_matrix(rng, 32);
    const auto d = dct2(m);
    double e0 = 0, e1 = 0;
    for (double v : m.data)
        e0 += v * v;
    for (double v : d.data)
        e1 += v * v;
    CHECK(e1 == doctest::Approx(e0).epsilon(1e-12));
}

TEST_CASE("constant image hashes to zero")
{
    CHECK(phash(Matrix(40, 40, 128.0)).bits == 0);
    CHECK(phash(Matrix(8, 8, 0.0)).bits == 0);
    CHECK_THROWS_AS(phash(Matrix(7, 40, 1.0)), Error);
}

TEST_CASE("golden hash of the seed-42 synthetic image")
{
    const auto img = synthetic_image(42, 64);

    // Independent evaluation: oracle resize and DCT, full sort for the median.
    const auto coeffs = oracle::dct2(oracle::resize_area(img, 32));
    std::vector<double> ac;
    for (std::size_t i = 1; i < 64; ++i)
        ac.push_back(coeffs(i / 8, i % 8));
    std::sort(ac.begin(), ac.end());
    std::uint64_t bits = 0;
    for (std::size_t i = 1; i < 64; ++i)
        if (coeffs(i / 8, i % 8) > ac[31])
            bits |= std::uint64_t{1} << i;

    CHECK(phash(img).bits == bits);
    CHECK(phash(img).hex() == "87fd87b475036032");
}

TEST_CASE("hash structure: DC bit clear, at most 31 AC bits above the median")
{
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto h = phash(synthetic_image(rng.next(), 64));
        CHECK((h.bits & 1u) == 0);
        CHECK(std::popcount(h.bits) <= 31);
    }
}

TEST_CASE("hash is invariant under positive affine intensity maps")
{
    Rng rng(99);
    for (int i = 0; i < 50; ++i) {
        const auto img = synthetic_image(rng.next(), 48 + rng.below(40));
        auto mapped = img;
        const double a = rng.uniform(0.1, 10.0), b = rng.uniform(-50.0, 50.0);
        for (double& v : mapped.data)
            v = a * v + b;
        CHECK(phash(mapped) == phash(img));
    }
}

TEST_CASE("hamming distance")
{
    const PerceptualHash h{0x0123456789abcdefULL};
    CHECK(hamming(h, h) == 0);
    CHECK(hamming(PerceptualHash{0}, PerceptualHash{~std::uint64_t{1}}) == 63);
    CHECK(hamming(PerceptualHash{0b1100}, PerceptualHash{0b1010}) == 2);
    CHECK(hamming(h, PerceptualHash{0}) == hamming(PerceptualHash{0}, h));
}

TEST_CASE("hex round trip")
{
    CHECK(PerceptualHash{1}.hex() == "0000000000000001");
    CHECK(PerceptualHash{0xfedcba9876543210ULL}.hex() == "fedcba9876543210");
    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
        const PerceptualHash h{rng.next()};
        CHECK(PerceptualHash::from_hex(h.hex()) == h);
    }
    CHECK_THROWS_AS(PerceptualHash::from_hex("123"), Error);
    CHECK_THROWS_AS(PerceptualHash::from_hex("zzzzzzzzzzzzzzzz"), Error);
}

TEST_CASE("parallel batch hashing equals the serial reference")
{
    std::vector<GrayImage> images;
    for (std::uint64_t s = 0; s < 64; ++s)
        images.push_back(synthetic_image(s, 64));
    CHECK(hash_images(images) == hash_images_serial(images));
    images.push_back(Matrix(4, 4, 0.0));
    CHECK_THROWS_AS(hash_images(images), Error);
}
