#include "memeconf/error.hpp"
#include "memeconf/image.hpp"
#include "memeconf/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace memeconf;
namespace fs = std::filesystem;

namespace {

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols)
{
    Matrix m(rows, cols);
    for (double& v : m.data)
        v = double(rng.below(256));
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b)
{
    REQUIRE(a.rows == b.rows);
    REQUIRE(a.cols == b.cols);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    return worst;
}

} // namespace

TEST_CASE("grayscale conversion")
{
    Raster red{1, 1, 3, {255, 0, 0}};
    CHECK(to_grayscale(red)(0, 0) == doctest::Approx(76.245).epsilon(1e-12));

    Raster grey{2, 2, 3, {10, 10, 10, 20, 20, 20, 30, 30, 30, 40, 40, 40}};
    const auto g = to_grayscale(grey);
    CHECK(g(0, 0) == doctest::Approx(10));
    CHECK(g(1, 1) == doctest::Approx(40));

    Raster single{2, 3, 1, {1, 2, 3, 4, 5, 6}};
    CHECK(to_grayscale(single).data == single.data);

    Raster bad{1, 1, 2, {0, 0}};
    CHECK_THROWS_AS(to_grayscale(bad), Error);
}

TEST_CASE("area resize: constant, global mean, oracle")
{
    const Matrix seven(13, 21, 7.0);
    for (double v : resize_area(seven, 5).data)
        CHECK(v == doctest::Approx(7.0));

    Matrix two(2, 2);
    two(1, 0) = two(1, 1) = 100;
    CHECK(resize_area(two, 1)(0, 0) == doctest::Approx(50.0));

    Matrix ramp(3, 3);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c)
            ramp(r, c) = double(3 * r + c);
    const auto small = resize_area(ramp, 2);
    CHECK(max_abs_diff(small, oracle::resize_area(ramp, 2)) < 1e-12);
    CHECK(small(0, 0) == doctest::Approx(4.0 / 9.0 * 0 + 2.0 / 9.0 * 1 + 2.0 / 9.0 * 3 + 1.0 / 9.0 * 4));

    Rng rng(31);
    for (int i = 0; i < 40; ++i) {
        const auto m = random_matrix(rng, 1 + rng.below(70), 1 + rng.below(70));
        const auto side = 1 + rng.below(40);
        CHECK(max_abs_diff(resize_area(m, side), oracle::resize_area(m, side)) < 1e-9);
    }
}

TEST_CASE("area resize preserves the mean")
{
    Rng rng(5);
    const auto m = random_matrix(rng, 45, 61);
    const auto s = resize_area(m, 32);
    double a = 0, b = 0;
    for (double v : m.data)
        a += v;
    for (double v : s.data)
        b += v;
    CHECK(a / double(m.data.size()) == doctest::Approx(b / double(s.data.size())));
}

TEST_CASE("PGM round trip and PPM conversion")
{
    const auto dir = fs::temp_directory_path() / "memeconf_test_image";
    fs::create_directories(dir);
    Rng rng(8);
    const auto img = random_matrix(rng, 17, 23);
    write_pgm(img, dir / "a.pgm");
    CHECK(read_pnm(dir / "a.pgm") == img);

    {
        std::ofstream out(dir / "b.ppm", std::ios::binary);
        out << "P6\n# comment\n2 1\n255\n";
        const unsigned char px[] = {255, 0, 0, 0, 255, 0};
        out.write(reinterpret_cast<const char*>(px), sizeof px);
    }
    const auto rgb = read_pnm(dir / "b.ppm");
    CHECK(rgb(0, 0) == doctest::Approx(76.245));
    CHECK(rgb(0, 1) == doctest::Approx(0.587 * 255));

    {
        std::ofstream out(dir / "c.pgm", std::ios::binary);
        out << "P5\n4 4\n255\n"
            << "abc";
    }
    CHECK_THROWS_AS(read_pnm(dir / "c.pgm"), Error);
    CHECK_THROWS_AS(read_pnm(dir / "missing.pgm"), Error);
    fs::remove_all(dir);
}
