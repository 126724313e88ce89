#pragma once

#include "memeconf/phash.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace memeconf {

using MemeId = std::uint64_t;

struct HashEntry {
    MemeId id = 0;
    PerceptualHash hash;

    bool operator==(const HashEntry&) const = default;
};

struct Neighbor {
    MemeId id = 0;
    int distance = 0;

    auto operator<=>(const Neighbor&) const = default;
};

/// Exact radius search over the Hamming metric, backed by a BK-tree.
/// Build is single-writer; const queries may run concurrently.
class HammingIndex {
public:
    HammingIndex() = default;
    explicit HammingIndex(std::span<const HashEntry> entries);

    void insert(const HashEntry& entry);

    /// All entries within `radius` of `h`, sorted by (distance, id).
    std::vector<Neighbor> query(PerceptualHash h, int radius) const;

    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }

private:
    struct Node {
        PerceptualHash hash;
        std::vector<MemeId> ids;                                // entries equal to `hash`
        std::vector<std::pair<std::uint8_t, std::uint32_t>> kids; // (edge distance, node index)
    };

    std::vector<Node> nodes_;
    std::size_t count_ = 0;
};

/// Reference implementation of HammingIndex::query.
std::vector<Neighbor> linear_scan(std::span<const HashEntry> entries, PerceptualHash h, int radius);

/// Index pairs (i < j) of entries within `radius`, sorted. radius_pairs
/// splits rows of the flat popcount scan over OpenMP threads; the serial
/// version is the reference.
std::vector<std::pair<std::size_t, std::size_t>> radius_pairs(std::span<const HashEntry> entries, int radius);
std::vector<std::pair<std::size_t, std::size_t>> radius_pairs_serial(std::span<const HashEntry> entries,
                                                                     int radius);

} // namespace memeconf
