#include "memeconf/hamming_index.hpp"

#include "memeconf/error.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace memeconf {

namespace {

void check_radius(int radius)
{
    if (radius < 0 || radius > 64)
        throw Error(Errc::invalid_argument, "hamming radius must be in [0, 64], got " + std::to_string(radius));
}

} // namespace

HammingIndex::HammingIndex(std::span<const HashEntry> entries)
{
    nodes_.reserve(entries.size());
    for (const auto& e : entries)
        insert(e);
}

void HammingIndex::insert(const HashEntry& entry)
{
    ++count_;
    if (nodes_.empty()) {
        nodes_.push_back(Node{entry.hash, {entry.id}, {}});
        return;
    }
    std::uint32_t cur = 0;
    while (true) {
        const int d = hamming(nodes_[cur].hash, entry.hash);
        if (d == 0) {
            nodes_[cur].ids.push_back(entry.id);
            return;
        }
        auto& kids = nodes_[cur].kids;
        auto it = std::find_if(kids.begin(), kids.end(), [d](const auto& k) { return k.first == d; });
        if (it == kids.end()) {
            const auto next = static_cast<std::uint32_t>(nodes_.size());
            kids.emplace_back(static_cast<std::uint8_t>(d), next);
            nodes_.push_back(Node{entry.hash, {entry.id}, {}});
            return;
        }
        cur = it->second;
    }
}

std::vector<Neighbor> HammingIndex::query(PerceptualHash h, int radius) const
{
    check_radius(radius);
    std::vector<Neighbor> out;
    if (nodes_.empty())
        return out;

    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        const int d = hamming(node.hash, h);
        if (d <= radius)
            for (auto id : node.ids)
                out.push_back(Neighbor{id, d});
        // Triangle inequality: a child at edge distance e can only hold
        // matches when |e - d| <= radius.
        for (const auto& [edge, child] : node.kids)
            if (edge >= d - radius && edge <= d + radius)
                stack.push_back(child);
    }
    std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
    });
    return out;
}

std::vector<Neighbor> linear_scan(std::span<const HashEntry> entries, PerceptualHash h, int radius)
{
    check_radius(radius);
    std::vector<Neighbor> out;
    for (const auto& e : entries) {
        const int d = hamming(e.hash, h);
        if (d <= radius)
            out.push_back(Neighbor{e.id, d});
    }
    std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
    });
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> radius_pairs_serial(std::span<const HashEntry> entries,
                                                                     int radius)
{
    check_radius(radius);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < entries.size(); ++i)
        for (std::size_t j = i + 1; j < entries.size(); ++j)
            if (hamming(entries[i].hash, entries[j].hash) <= radius)
                out.emplace_back(i, j);
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> radius_pairs(std::span<const HashEntry> entries, int radius)
{
    check_radius(radius);
    std::vector<std::uint64_t> bits(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i)
        bits[i] = entries[i].hash.bits;

    const auto n = static_cast<std::ptrdiff_t>(bits.size());
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> per_item(bits.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto a = bits[i];
        for (std::ptrdiff_t j = i + 1; j < n; ++j)
            if (std::popcount(a ^ bits[j]) <= radius)
                per_item[i].emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }

    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (auto& v : per_item)
        out.insert(out.end(), v.begin(), v.end());
    return out;
}

} // namespace memeconf
