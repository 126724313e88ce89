#include "memeconf/image.hpp"

#include "memeconf/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

namespace memeconf {

GrayImage to_grayscale(const Raster& img)
{
    if (img.channels != 1 && img.channels != 3)
        throw Error(Errc::invalid_argument,
                    "unsupported channel count " + std::to_string(img.channels) + " (expected 1 or 3)");
    if (img.data.size() != img.height * img.width * img.channels)
        throw Error(Errc::invalid_argument, "raster data size does not match its dimensions");

    GrayImage out(img.height, img.width);
    if (img.channels == 1) {
        out.data = img.data;
        return out;
    }
    for (std::size_t r = 0; r < img.height; ++r)
        for (std::size_t c = 0; c < img.width; ++c)
            out(r, c) = 0.299 * img(r, c, 0) + 0.587 * img(r, c, 1) + 0.114 * img(r, c, 2);
    return out;
}

namespace {

// overlap[i][k] = |[i*len, (i+1)*len) ∩ [k*side, (k+1)*side)| in units where the
// input axis has length len*side. Row i sums to len exactly.
std::vector<std::vector<std::size_t>> overlap_table(std::size_t len, std::size_t side)
{
    std::vector<std::vector<std::size_t>> table(side, std::vector<std::size_t>(len, 0));
    for (std::size_t i = 0; i < side; ++i) {
        const std::size_t lo = i * len;
        const std::size_t hi = (i + 1) * len;
        for (std::size_t k = lo / side; k < len && k * side < hi; ++k) {
            const std::size_t a = std::max(lo, k * side);
            const std::size_t b = std::min(hi, (k + 1) * side);
            if (b > a)
                table[i][k] = b - a;
        }
    }
    return table;
}

} // namespace

GrayImage resize_area(const GrayImage& m, std::size_t side)
{
    if (m.rows == 0 || m.cols == 0 || side == 0)
        throw Error(Errc::invalid_argument, "resize_area needs a non-empty image and side >= 1");

    const auto wr = overlap_table(m.rows, side);
    const auto wc = overlap_table(m.cols, side);

    Matrix tmp(side, m.cols);
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t r = 0; r < m.rows; ++r) {
            const auto w = wr[i][r];
            if (w == 0)
                continue;
            for (std::size_t c = 0; c < m.cols; ++c)
                tmp(i, c) += static_cast<double>(w) * m(r, c);
        }

    const double norm = static_cast<double>(m.rows) * static_cast<double>(m.cols);
    GrayImage out(side, side);
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j) {
            double acc = 0.0;
            for (std::size_t c = 0; c < m.cols; ++c)
                if (wc[j][c] != 0)
                    acc += static_cast<double>(wc[j][c]) * tmp(i, c);
            out(i, j) = acc / norm;
        }
    return out;
}

namespace {

std::string next_token(std::istream& in, const std::filesystem::path& path)
{
    std::string tok;
    while (true) {
        int ch = in.get();
        if (ch == EOF)
            throw Error(Errc::parse, path.string() + ": truncated PNM header");
        if (ch == '#') {
            std::string skip;
            std::getline(in, skip);
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty())
                return tok;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
}

std::size_t header_number(std::istream& in, const std::filesystem::path& path)
{
    const auto tok = next_token(in, path);
    try {
        std::size_t pos = 0;
        const auto v = std::stoul(tok, &pos);
        if (pos != tok.size())
            throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw Error(Errc::parse, path.string() + ": bad PNM header field '" + tok + "'");
    }
}

} // namespace

GrayImage read_pnm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::io, "cannot open image " + path.string());

    const auto magic = next_token(in, path);
    if (magic != "P5" && magic != "P6")
        throw Error(Errc::parse, path.string() + ": unsupported image format " + magic);
    const std::size_t channels = magic == "P5" ? 1 : 3;
    const auto width = header_number(in, path);
    const auto height = header_number(in, path);
    const auto maxval = header_number(in, path);
    if (width == 0 || height == 0 || maxval == 0 || maxval > 255)
        throw Error(Errc::parse, path.string() + ": unsupported PNM dimensions or maxval");

    std::vector<unsigned char> bytes(width * height * channels);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw Error(Errc::parse, path.string() + ": truncated pixel data");

    Raster raster{height, width, channels, std::vector<double>(bytes.size())};
    const double scale = 255.0 / static_cast<double>(maxval);
    for (std::size_t i = 0; i < bytes.size(); ++i)
        raster.data[i] = maxval == 255 ? bytes[i] : bytes[i] * scale;
    return to_grayscale(raster);
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(Errc::io, "cannot write image " + path.string());
    out << "P5\n" << img.cols << ' ' << img.rows << "\n255\n";
    std::vector<unsigned char> bytes(img.data.size());
    for (std::size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = static_cast<unsigned char>(std::clamp(std::lround(img.data[i]), 0L, 255L));
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error(Errc::io, "failed writing image " + path.string());
}

} // namespace memeconf
