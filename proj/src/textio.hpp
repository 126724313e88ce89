#pragma once

// Line-oriented CSV helpers shared by the file readers/writers.

#include "memeconf/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

namespace memeconf::textio {

inline std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos)
            return out;
        start = comma + 1;
    }
}

inline std::uint64_t parse_uint(const std::string& s, const std::string& where)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(Errc::parse, where + ": expected a non-negative integer, got '" + s + "'");
    return v;
}

inline double parse_double(const std::string& s, const std::string& where)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw Error(Errc::parse, where + ": expected a number, got '" + s + "'");
    return v;
}

/// Shortest decimal text that reads back to exactly the same double.
inline std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Calls f(line, "path line N") for each non-empty line; strips CR.
template <typename F>
void for_each_line(const std::filesystem::path& path, F&& f)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io, "cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        f(line, lineno, path.string() + " line " + std::to_string(lineno));
    }
}

inline std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(Errc::io, "cannot write " + path.string());
    return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out)
        throw Error(Errc::io, "failed writing " + path.string());
}

} // namespace memeconf::textio
