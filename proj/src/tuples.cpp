#include "memeconf/tuples.hpp"

#include "memeconf/error.hpp"
#include "memeconf/union_find.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <unordered_map>

namespace memeconf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

std::vector<MemeId> group_members(const TupleGroup& g)
{
    return std::visit(overloaded{
                          [](const ThreeTuple& t) { return std::vector<MemeId>{t.pivot, t.image_partner, t.text_partner}; },
                          [](const TwoTuple& t) { return std::vector<MemeId>{t.a, t.b}; },
                          [](const UnimodalHate& u) { return u.members; },
                          [](const OtherGroup& o) { return o.members; },
                      },
                      g);
}

std::string_view group_kind(const TupleGroup& g)
{
    static constexpr std::array<std::string_view, 4> names{"three_tuple", "two_tuple", "unimodal_hate", "other"};
    return names[g.index()];
}

std::vector<TupleGroup> detect_tuples(std::span<const MemeRecord> memes, const ClusterAssignment& assignment)
{
    const std::size_t n = memes.size();
    std::vector<ClusterPair> cl(n);
    std::unordered_map<MemeId, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = assignment.find(memes[i].id);
        if (it == assignment.end())
            throw Error(Errc::missing_id, "meme " + std::to_string(memes[i].id) + " has no cluster assignment");
        if (!index.emplace(memes[i].id, i).second)
            throw Error(Errc::duplicate_id, "duplicate meme id " + std::to_string(memes[i].id));
        cl[i] = it->second;
    }

    UnionFind uf(n);
    {
        std::unordered_map<MemeId, std::size_t> first_image, first_text;
        for (std::size_t i = 0; i < n; ++i) {
            if (auto [it, fresh] = first_image.emplace(cl[i].image, i); !fresh)
                uf.unite(it->second, i);
            if (auto [it, fresh] = first_text.emplace(cl[i].text, i); !fresh)
                uf.unite(it->second, i);
        }
    }

    std::unordered_map<std::size_t, std::vector<std::size_t>> by_root;
    for (std::size_t i = 0; i < n; ++i)
        by_root[uf.find(i)].push_back(i);

    std::vector<std::pair<MemeId, TupleGroup>> keyed;
    auto id_of = [&](std::size_t i) { return memes[i].id; };
    for (auto& [root, comp] : by_root) {
        if (comp.size() < 2)
            continue;
        std::sort(comp.begin(), comp.end(), [&](std::size_t a, std::size_t b) { return id_of(a) < id_of(b); });
        const MemeId key = id_of(comp.front());

        if (comp.size() == 2) {
            const auto a = comp[0], b = comp[1];
            const bool img = cl[a].image == cl[b].image;
            const bool txt = cl[a].text == cl[b].text;
            if (img != txt) {
                keyed.emplace_back(key, TwoTuple{id_of(a), id_of(b), img ? Modality::image : Modality::text});
                continue;
            }
        } else if (comp.size() == 3) {
            std::array<std::size_t, 3> p{comp[0], comp[1], comp[2]};
            std::sort(p.begin(), p.end()); // next_permutation must start from the first permutation
            bool found = false;
            do {
                const auto piv = p[0], im = p[1], tx = p[2];
                if (cl[piv].image == cl[im].image && cl[piv].text == cl[tx].text &&
                    cl[im].image != cl[tx].image && cl[im].text != cl[tx].text) {
                    keyed.emplace_back(key, ThreeTuple{id_of(piv), id_of(im), id_of(tx)});
                    found = true;
                    break;
                }
            } while (std::next_permutation(p.begin(), p.end()));
            if (found)
                continue;
        }

        OtherGroup other;
        for (auto i : comp)
            other.members.push_back(id_of(i));
        keyed.emplace_back(key, std::move(other));
    }

    std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<TupleGroup> out;
    out.reserve(keyed.size());
    for (auto& [key, g] : keyed)
        out.push_back(std::move(g));
    return out;
}

std::vector<TupleGroup> detect_unimodal_hate(std::span<const MemeRecord> labeled, const ClusterAssignment& assignment)
{
    struct Tally {
        std::vector<MemeId> members;
        bool all_hateful = true;
    };
    std::map<MemeId, Tally> images, texts;
    for (const auto& r : labeled) {
        if (!r.label)
            throw Error(Errc::missing_field, "unimodal-hate detection needs labels; meme " + std::to_string(r.id) +
                                                 " is unlabeled");
        const auto it = assignment.find(r.id);
        if (it == assignment.end())
            throw Error(Errc::missing_id, "meme " + std::to_string(r.id) + " has no cluster assignment");
        for (auto* table : {&images, &texts}) {
            auto& t = (*table)[table == &images ? it->second.image : it->second.text];
            t.members.push_back(r.id);
            t.all_hateful = t.all_hateful && *r.label == 1;
        }
    }

    std::vector<TupleGroup> out;
    for (auto [modality, table] : {std::pair{Modality::image, &images}, std::pair{Modality::text, &texts}})
        for (auto& [cluster, t] : *table)
            if (t.members.size() >= 2 && t.all_hateful) {
                std::sort(t.members.begin(), t.members.end());
                out.push_back(UnimodalHate{modality, cluster, t.members});
            }
    return out;
}

TupleStats tuple_stats(std::span<const TupleGroup> groups, std::size_t total)
{
    TupleStats s;
    s.total = total;
    for (const auto& g : groups) {
        switch (g.index()) {
        case 0: ++s.three_tuples; break;
        case 1: ++s.two_tuples; break;
        case 2: ++s.unimodal_signatures; break;
        default: ++s.other_groups; break;
        }
    }
    return s;
}

std::string format_tuple_stats(const TupleStats& s)
{
    char buf[512];
    std::string out;
    std::snprintf(buf, sizeof buf, "%-14s %6.1f%%  (%zu groups, %zu memes)\n", "3-tuple", 100.0 * s.three_tuple_frac(),
                  s.three_tuples, 3 * s.three_tuples);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-14s %6.1f%%  (%zu groups, %zu memes)\n", "2-tuple", 100.0 * s.two_tuple_frac(),
                  s.two_tuples, 2 * s.two_tuples);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-14s %zu groups\n%-14s %zu signatures\n", "other", s.other_groups,
                  "unimodal-hate", s.unimodal_signatures);
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "{\"total\":%zu,\"three_tuple\":%.6f,\"two_tuple\":%.6f,\"three_tuples\":%zu,\"two_tuples\":%zu,"
                  "\"other\":%zu,\"unimodal_hate\":%zu}\n",
                  s.total, s.three_tuple_frac(), s.two_tuple_frac(), s.three_tuples, s.two_tuples, s.other_groups,
                  s.unimodal_signatures);
    out += buf;
    return out;
}

std::string group_to_json(const TupleGroup& g)
{
    nlohmann::ordered_json j;
    j["kind"] = std::string(group_kind(g));
    const auto members = group_members(g);
    j["members"] = members;
    std::visit(overloaded{
                   [&](const ThreeTuple&) {
                       j["roles"] = {"pivot", "image_partner", "text_partner"};
                   },
                   [&](const TwoTuple& t) {
                       j["roles"] = {"a", "b"};
                       j["shared"] = std::string(to_string(t.shared));
                   },
                   [&](const UnimodalHate& u) {
                       j["roles"] = std::vector<std::string>(members.size(), "member");
                       j["modality"] = std::string(to_string(u.modality));
                       j["cluster"] = u.cluster;
                   },
                   [&](const OtherGroup&) { j["roles"] = std::vector<std::string>(members.size(), "member"); },
               },
               g);
    return j.dump();
}

namespace {

Modality parse_modality(const std::string& s)
{
    if (s == "image")
        return Modality::image;
    if (s == "text")
        return Modality::text;
    throw Error(Errc::parse, "unknown modality '" + s + "'");
}

} // namespace

TupleGroup group_from_json(std::string_view line)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::parse, e.what());
    }
    try {
        const auto kind = j.at("kind").get<std::string>();
        auto members = j.at("members").get<std::vector<MemeId>>();
        if (kind == "three_tuple") {
            if (members.size() != 3)
                throw Error(Errc::parse, "three_tuple needs 3 members");
            return ThreeTuple{members[0], members[1], members[2]};
        }
        if (kind == "two_tuple") {
            if (members.size() != 2)
                throw Error(Errc::parse, "two_tuple needs 2 members");
            return TwoTuple{members[0], members[1], parse_modality(j.at("shared").get<std::string>())};
        }
        std::sort(members.begin(), members.end());
        if (kind == "unimodal_hate")
            return UnimodalHate{parse_modality(j.at("modality").get<std::string>()), j.at("cluster").get<MemeId>(),
                                std::move(members)};
        if (kind == "other")
            return OtherGroup{std::move(members)};
        throw Error(Errc::parse, "unknown group kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse, e.what());
    }
}

void write_groups(std::span<const TupleGroup> groups, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error(Errc::io, "cannot write " + path.string());
    for (const auto& g : groups)
        out << group_to_json(g) << '\n';
    if (!out)
        throw Error(Errc::io, "failed writing " + path.string());
}

std::vector<TupleGroup> read_groups(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io, "cannot open " + path.string());
    std::vector<TupleGroup> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            out.push_back(group_from_json(line));
        } catch (const Error& e) {
            throw Error(e.code(), path.string() + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

} // namespace memeconf
