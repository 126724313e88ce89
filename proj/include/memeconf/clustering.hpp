#pragma once

#include "memeconf/dataset.hpp"
#include "memeconf/hamming_index.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memeconf {

inline constexpr int kDefaultHammingThreshold = 10;

/// Simple Unicode lowercase (Latin, Greek, Cyrillic, fullwidth ranges), trim,
/// and collapse internal whitespace runs to one ASCII space.
std::string normalize_text(std::string_view s);

struct ClusterPair {
    MemeId image = 0;
    MemeId text = 0;
    bool operator==(const ClusterPair&) const = default;
};

/// meme id -> (image cluster, text cluster). Each cluster is labeled by the
/// smallest meme id it contains.
using ClusterAssignment = std::map<MemeId, ClusterPair>;

/// Single-link closure of hamming <= threshold, via the BK-tree pair search.
std::map<MemeId, MemeId> cluster_images(std::span<const HashEntry> hashes, int threshold);
std::map<MemeId, MemeId> cluster_texts(std::span<const MemeRecord> memes);

/// Combines both; every id in `hashes` must have a record and vice versa.
ClusterAssignment assign_clusters(std::span<const MemeRecord> memes, std::span<const HashEntry> hashes,
                                  int threshold);

struct CorpusStats {
    std::size_t total = 0;
    std::size_t image_repeat = 0; // memes whose image cluster has >= 2 members
    std::size_t text_repeat = 0;
    std::size_t independent = 0;  // both clusters singletons

    double image_repeat_frac() const { return total ? double(image_repeat) / double(total) : 0.0; }
    double text_repeat_frac() const { return total ? double(text_repeat) / double(total) : 0.0; }
    double independent_frac() const { return total ? double(independent) / double(total) : 0.0; }
};

CorpusStats corpus_stats(const ClusterAssignment& assignment);
/// Aligned text table followed by one JSON line.
std::string format_corpus_stats(const CorpusStats& stats);

// Hash file: lines "id,hash_hex". Cluster file: lines "id,image_cluster,text_cluster".
std::vector<HashEntry> hash_manifest(std::span<const MemeRecord> records, const std::filesystem::path& base_dir);
void write_hashes(std::span<const HashEntry> hashes, const std::filesystem::path& path);
std::vector<HashEntry> read_hashes(const std::filesystem::path& path);
void write_clusters(const ClusterAssignment& assignment, const std::filesystem::path& path);
ClusterAssignment read_clusters(const std::filesystem::path& path);

} // namespace memeconf
