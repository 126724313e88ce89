#pragma once

#include "memeconf/clustering.hpp"
#include "memeconf/dataset.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace memeconf {

struct ThreeTuple {
    MemeId pivot = 0;          // shares its image with image_partner and its text with text_partner
    MemeId image_partner = 0;
    MemeId text_partner = 0;
    auto operator<=>(const ThreeTuple&) const = default;
};

struct TwoTuple {
    MemeId a = 0; // a < b
    MemeId b = 0;
    Modality shared = Modality::image;
    auto operator<=>(const TwoTuple&) const = default;
};

struct UnimodalHate {
    Modality modality = Modality::image;
    MemeId cluster = 0;
    std::vector<MemeId> members; // sorted
    auto operator<=>(const UnimodalHate&) const = default;
};

struct OtherGroup {
    std::vector<MemeId> members; // sorted
    auto operator<=>(const OtherGroup&) const = default;
};

using TupleGroup = std::variant<ThreeTuple, TwoTuple, UnimodalHate, OtherGroup>;

/// Member ids of any group, in role order for tuples and sorted otherwise.
std::vector<MemeId> group_members(const TupleGroup& g);
std::string_view group_kind(const TupleGroup& g);

/// Connected components of the same-image / same-text relation among `memes`.
/// Size-3 components with the pivot pattern become ThreeTuples, size-2
/// components sharing exactly one modality TwoTuples, everything else with
/// two or more members Other. Groups are ordered by smallest member id.
std::vector<TupleGroup> detect_tuples(std::span<const MemeRecord> memes, const ClusterAssignment& assignment);

/// Image and text clusters (size >= 2 within `labeled`) whose members are all hateful.
std::vector<TupleGroup> detect_unimodal_hate(std::span<const MemeRecord> labeled,
                                             const ClusterAssignment& assignment);

struct TupleStats {
    std::size_t total = 0;
    std::size_t three_tuples = 0;
    std::size_t two_tuples = 0;
    std::size_t other_groups = 0;
    std::size_t unimodal_signatures = 0;

    double three_tuple_frac() const { return total ? 3.0 * double(three_tuples) / double(total) : 0.0; }
    double two_tuple_frac() const { return total ? 2.0 * double(two_tuples) / double(total) : 0.0; }
};

TupleStats tuple_stats(std::span<const TupleGroup> groups, std::size_t total);
std::string format_tuple_stats(const TupleStats& stats);

// One JSON object per line: {"kind": ..., "members": [...], "roles": [...], ...}
void write_groups(std::span<const TupleGroup> groups, const std::filesystem::path& path);
std::vector<TupleGroup> read_groups(const std::filesystem::path& path);
std::string group_to_json(const TupleGroup& g);
TupleGroup group_from_json(std::string_view line);

} // namespace memeconf
