#include "memeconf/clustering.hpp"

#include "memeconf/error.hpp"
#include "memeconf/union_find.hpp"
#include "textio.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace memeconf {

namespace {

// Labels each index with the smallest id in its component.
std::map<MemeId, MemeId> min_id_labels(UnionFind& uf, std::span<const MemeId> ids)
{
    std::unordered_map<std::size_t, MemeId> root_min;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto root = uf.find(i);
        auto [it, inserted] = root_min.emplace(root, ids[i]);
        if (!inserted)
            it->second = std::min(it->second, ids[i]);
    }
    std::map<MemeId, MemeId> out;
    for (std::size_t i = 0; i < ids.size(); ++i)
        out.emplace(ids[i], root_min.at(uf.find(i)));
    return out;
}

} // namespace

std::map<MemeId, MemeId> cluster_images(std::span<const HashEntry> hashes, int threshold)
{
    if (threshold < 0 || threshold > 64)
        throw Error(Errc::invalid_argument, "hamming threshold must be in [0, 64]");
    std::vector<MemeId> ids;
    std::unordered_set<MemeId> seen;
    for (const auto& h : hashes) {
        if (!seen.insert(h.id).second)
            throw Error(Errc::duplicate_id, "duplicate id " + std::to_string(h.id) + " in hash list");
        ids.push_back(h.id);
    }

    UnionFind uf(hashes.size());
    for (auto [i, j] : radius_pairs(hashes, threshold))
        uf.unite(i, j);
    return min_id_labels(uf, ids);
}

std::map<MemeId, MemeId> cluster_texts(std::span<const MemeRecord> memes)
{
    std::map<std::string, MemeId> smallest;
    for (const auto& m : memes) {
        auto [it, inserted] = smallest.emplace(normalize_text(m.text), m.id);
        if (!inserted)
            it->second = std::min(it->second, m.id);
    }
    std::map<MemeId, MemeId> out;
    for (const auto& m : memes)
        if (!out.emplace(m.id, smallest.at(normalize_text(m.text))).second)
            throw Error(Errc::duplicate_id, "duplicate id " + std::to_string(m.id) + " in meme list");
    return out;
}

ClusterAssignment assign_clusters(std::span<const MemeRecord> memes, std::span<const HashEntry> hashes,
                                  int threshold)
{
    const auto images = cluster_images(hashes, threshold);
    const auto texts = cluster_texts(memes);
    if (images.size() != texts.size())
        throw Error(Errc::coverage_mismatch, "hash list and manifest cover different memes");
    ClusterAssignment out;
    for (const auto& [id, text_cluster] : texts) {
        const auto it = images.find(id);
        if (it == images.end())
            throw Error(Errc::coverage_mismatch, "meme " + std::to_string(id) + " has no hash");
        out.emplace(id, ClusterPair{it->second, text_cluster});
    }
    return out;
}

CorpusStats corpus_stats(const ClusterAssignment& assignment)
{
    std::unordered_map<MemeId, std::size_t> image_size, text_size;
    for (const auto& [id, c] : assignment) {
        ++image_size[c.image];
        ++text_size[c.text];
    }
    CorpusStats s;
    s.total = assignment.size();
    for (const auto& [id, c] : assignment) {
        const bool img = image_size[c.image] >= 2;
        const bool txt = text_size[c.text] >= 2;
        s.image_repeat += img;
        s.text_repeat += txt;
        s.independent += !img && !txt;
    }
    return s;
}

std::string format_corpus_stats(const CorpusStats& s)
{
    char buf[512];
    std::string out;
    auto row = [&](const char* name, std::size_t count, double frac) {
        std::snprintf(buf, sizeof buf, "%-14s %6.1f%%  (%zu/%zu)\n", name, 100.0 * frac, count, s.total);
        out += buf;
    };
    row("image-repeat", s.image_repeat, s.image_repeat_frac());
    row("text-repeat", s.text_repeat, s.text_repeat_frac());
    row("independent", s.independent, s.independent_frac());
    std::snprintf(buf, sizeof buf,
                  "{\"total\":%zu,\"image_repeat\":%.6f,\"text_repeat\":%.6f,\"independent\":%.6f}\n", s.total,
                  s.image_repeat_frac(), s.text_repeat_frac(), s.independent_frac());
    out += buf;
    return out;
}

std::vector<HashEntry> hash_manifest(std::span<const MemeRecord> records, const std::filesystem::path& base_dir)
{
    std::vector<GrayImage> images;
    images.reserve(records.size());
    for (const auto& r : records)
        images.push_back(read_pnm(base_dir / r.image_ref));
    const auto hashes = hash_images(images);
    std::vector<HashEntry> out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        out.push_back(HashEntry{records[i].id, hashes[i]});
    return out;
}

using namespace textio;

void write_hashes(std::span<const HashEntry> hashes, const std::filesystem::path& path)
{
    auto out = open_out(path);
    for (const auto& h : hashes)
        out << h.id << ',' << h.hash.hex() << '\n';
    finish(out, path);
}

std::vector<HashEntry> read_hashes(const std::filesystem::path& path)
{
    std::vector<HashEntry> out;
    std::unordered_set<MemeId> seen;
    for_each_line(path, [&](const std::string& line, std::size_t, const std::string& where) {
        const auto f = split_csv(line);
        if (f.size() != 2)
            throw Error(Errc::parse, where + ": expected 'id,hash_hex'");
        HashEntry e{parse_uint(f[0], where), {}};
        try {
            e.hash = PerceptualHash::from_hex(f[1]);
        } catch (const Error& err) {
            throw Error(Errc::parse, where + ": " + err.what());
        }
        if (!seen.insert(e.id).second)
            throw Error(Errc::duplicate_id, where + ": duplicate id " + f[0]);
        out.push_back(e);
    });
    return out;
}

void write_clusters(const ClusterAssignment& assignment, const std::filesystem::path& path)
{
    auto out = open_out(path);
    for (const auto& [id, c] : assignment)
        out << id << ',' << c.image << ',' << c.text << '\n';
    finish(out, path);
}

ClusterAssignment read_clusters(const std::filesystem::path& path)
{
    ClusterAssignment out;
    for_each_line(path, [&](const std::string& line, std::size_t, const std::string& where) {
        const auto f = split_csv(line);
        if (f.size() != 3)
            throw Error(Errc::parse, where + ": expected 'id,image_cluster,text_cluster'");
        const auto id = parse_uint(f[0], where);
        if (!out.emplace(id, ClusterPair{parse_uint(f[1], where), parse_uint(f[2], where)}).second)
            throw Error(Errc::duplicate_id, where + ": duplicate id " + f[0]);
    });
    return out;
}

} // namespace memeconf
