#include "memeconf/dataset.hpp"

#include "memeconf/clustering.hpp"
#include "memeconf/error.hpp"
#include "memeconf/phash.hpp"
#include "memeconf/rng.hpp"
#include "memeconf/vocabulary.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_set>

namespace memeconf {

std::string_view to_string(Split s) noexcept
{
    switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
    }
    return "train";
}

std::string_view to_string(Modality m) noexcept
{
    return m == Modality::image ? "image" : "text";
}

Split parse_split(std::string_view s)
{
    if (s == "train")
        return Split::train;
    if (s == "dev")
        return Split::dev;
    if (s == "test")
        return Split::test;
    throw Error(Errc::parse, "unknown split '" + std::string(s) + "'");
}

std::vector<Split> parse_split_list(std::string_view s)
{
    std::vector<Split> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        auto piece = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
        while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.front())))
            piece.remove_prefix(1);
        while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.back())))
            piece.remove_suffix(1);
        if (!piece.empty())
            out.push_back(parse_split(piece));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    if (out.empty())
        throw Error(Errc::invalid_argument, "empty split list");
    return out;
}

void validate_records(std::span<const MemeRecord> records)
{
    std::unordered_set<MemeId> seen;
    for (const auto& r : records) {
        if (!seen.insert(r.id).second)
            throw Error(Errc::duplicate_id, "duplicate meme id " + std::to_string(r.id));
        if (r.label && *r.label != 0 && *r.label != 1)
            throw Error(Errc::out_of_range, "label of meme " + std::to_string(r.id) + " must be 0 or 1");
        if (r.split == Split::train && !r.label)
            throw Error(Errc::missing_field, "train meme " + std::to_string(r.id) + " has no label");
    }
}

namespace {

using nlohmann::json;

MemeRecord record_from_json(const json& j, std::size_t line)
{
    auto where = [line] { return "manifest line " + std::to_string(line) + ": "; };
    if (!j.is_object())
        throw Error(Errc::parse, where() + "expected a JSON object");
    for (const char* key : {"id", "img", "text", "split"})
        if (!j.contains(key))
            throw Error(Errc::missing_field, where() + "missing field '" + key + "'");

    MemeRecord r;
    const auto& id = j.at("id");
    if (!id.is_number_unsigned())
        throw Error(Errc::parse, where() + "'id' must be a non-negative integer");
    r.id = id.get<MemeId>();
    if (!j.at("img").is_string() || !j.at("text").is_string() || !j.at("split").is_string())
        throw Error(Errc::parse, where() + "'img', 'text' and 'split' must be strings");
    r.image_ref = j.at("img").get<std::string>();
    r.text = j.at("text").get<std::string>();
    try {
        r.split = parse_split(j.at("split").get<std::string>());
    } catch (const Error& e) {
        throw Error(Errc::parse, where() + e.what());
    }
    if (j.contains("label") && !j.at("label").is_null()) {
        const auto& l = j.at("label");
        if (!l.is_number_integer() || (l.get<std::int64_t>() != 0 && l.get<std::int64_t>() != 1))
            throw Error(Errc::parse, where() + "'label' must be 0 or 1");
        r.label = l.get<int>();
    }
    if (r.split == Split::train && !r.label)
        throw Error(Errc::missing_field, where() + "train record without 'label'");
    return r;
}

} // namespace

std::vector<MemeRecord> parse_manifest(std::istream& in)
{
    std::vector<MemeRecord> out;
    std::unordered_set<MemeId> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(Errc::parse, "manifest line " + std::to_string(lineno) + ": " + e.what());
        }
        auto rec = record_from_json(j, lineno);
        if (!seen.insert(rec.id).second)
            throw Error(Errc::duplicate_id,
                        "manifest line " + std::to_string(lineno) + ": duplicate id " + std::to_string(rec.id));
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<MemeRecord> read_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io, "cannot open manifest " + path.string());
    return parse_manifest(in);
}

void write_manifest(std::span<const MemeRecord> records, std::ostream& out)
{
    validate_records(records);
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["id"] = r.id;
        j["img"] = r.image_ref;
        j["text"] = r.text;
        if (r.label)
            j["label"] = *r.label;
        j["split"] = std::string(to_string(r.split));
        out << j.dump() << '\n';
    }
}

void write_manifest(std::span<const MemeRecord> records, const std::filesystem::path& path)
{
    validate_records(records);
    std::ofstream out(path);
    if (!out)
        throw Error(Errc::io, "cannot write manifest " + path.string());
    write_manifest(records, static_cast<std::ostream&>(out));
    if (!out)
        throw Error(Errc::io, "failed writing manifest " + path.string());
}

std::vector<MemeRecord> filter_splits(std::span<const MemeRecord> records, std::span<const Split> splits)
{
    std::vector<MemeRecord> out;
    for (const auto& r : records)
        if (std::find(splits.begin(), splits.end(), r.split) != splits.end())
            out.push_back(r);
    return out;
}

void DatasetComposition::validate() const
{
    const double f[] = {multimodal_hate, unimodal_hate, benign_text_confounder, benign_image_confounder,
                        random_benign};
    double sum = 0.0;
    for (double v : f) {
        if (!(v >= 0.0))
            throw Error(Errc::invalid_argument, "composition fractions must be >= 0");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error(Errc::invalid_argument, "composition fractions must sum to 1");
}

DatasetComposition DatasetComposition::parse(std::string_view text)
{
    std::vector<double> v;
    std::stringstream ss{std::string(text)};
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        try {
            std::size_t pos = 0;
            v.push_back(std::stod(piece, &pos));
            if (pos != piece.size())
                throw std::invalid_argument(piece);
        } catch (const std::exception&) {
            throw Error(Errc::invalid_argument, "bad composition value '" + piece + "'");
        }
    }
    if (v.size() != 5)
        throw Error(Errc::invalid_argument, "composition needs 5 comma-separated fractions");
    DatasetComposition c{v[0], v[1], v[2], v[3], v[4]};
    c.validate();
    return c;
}

std::array<std::size_t, 5> composition_counts(std::size_t n, const DatasetComposition& c)
{
    c.validate();
    auto part = [n](double f) {
        // The epsilon keeps 0.4 * 100 from landing on 39.999...
        return static_cast<std::size_t>(std::floor(static_cast<double>(n) * f + 1e-9));
    };
    std::array<std::size_t, 5> counts{part(c.multimodal_hate), part(c.unimodal_hate),
                                      part(c.benign_text_confounder), part(c.benign_image_confounder), 0};
    const std::size_t used = counts[0] + counts[1] + counts[2] + counts[3];
    counts[4] = n - std::min(n, used);
    return counts;
}

// ---------------------------------------------------------------------------
// Synthetic content

namespace {

constexpr double kBandTop = 0.72;
constexpr double kBandBottom = 0.88;

std::pair<std::size_t, std::size_t> text_band_rows(std::size_t rows)
{
    const auto top = static_cast<std::size_t>(std::floor(kBandTop * static_cast<double>(rows)));
    const auto bottom = static_cast<std::size_t>(std::floor(kBandBottom * static_cast<double>(rows)));
    return {top, std::max(bottom, top + 1)};
}

double quantize(double v)
{
    return std::clamp(std::round(v), 0.0, 255.0);
}

} // namespace

GrayImage synthetic_image(std::uint64_t seed, std::size_t side)
{
    Rng rng(mix_keys({seed, 0x1a9e}));
    constexpr int kComponents = 10;
    struct Wave {
        double fx, fy, amp, phase;
    };
    std::vector<Wave> waves;
    for (int k = 0; k < kComponents; ++k) {
        const double fx = rng.uniform(-4.0, 4.0);
        const double fy = rng.uniform(-4.0, 4.0);
        const double f = std::hypot(fx, fy);
        waves.push_back({fx, fy, rng.uniform(12.0, 36.0) / (1.0 + 0.4 * f), rng.uniform(0.0, 2.0 * std::numbers::pi)});
    }

    GrayImage img(side, side);
    const double s = static_cast<double>(side);
    for (std::size_t y = 0; y < side; ++y)
        for (std::size_t x = 0; x < side; ++x) {
            double v = 128.0;
            for (const auto& w : waves)
                v += w.amp * std::cos(2.0 * std::numbers::pi * (w.fx * x / s + w.fy * y / s) + w.phase);
            img(y, x) = v;
        }

    // Caption band: 2x2 "ink" cells in a light/dark glyph pattern.
    const auto [top, bottom] = text_band_rows(side);
    const double ink = rng.bernoulli(0.5) ? 70.0 : -70.0;
    for (std::size_t y = top; y < bottom; y += 2)
        for (std::size_t x = 2; x + 2 < side; x += 2) {
            if (!rng.bernoulli(0.45))
                continue;
            for (std::size_t dy = 0; dy < 2 && y + dy < bottom; ++dy)
                for (std::size_t dx = 0; dx < 2; ++dx)
                    img(y + dy, x + dx) += ink;
        }

    for (double& v : img.data)
        v = quantize(v);
    return img;
}

GrayImage perturb_text_band(const GrayImage& img, double amplitude, std::uint64_t seed)
{
    GrayImage out = img;
    if (amplitude <= 0.0)
        return out;
    Rng rng(mix_keys({seed, 0xba4d}));
    const auto [top, bottom] = text_band_rows(img.rows);
    for (std::size_t y = top; y < bottom && y < img.rows; ++y)
        for (std::size_t x = 0; x < img.cols; ++x)
            out(y, x) = quantize(out(y, x) + rng.uniform(-amplitude, amplitude));
    return out;
}

std::string synthetic_text(std::uint64_t seed)
{
    Rng rng(mix_keys({seed, 0x7e47}));
    const auto words = vocabulary();
    const auto len = 4 + rng.below(9); // 4..12
    std::string out;
    for (std::size_t i = 0; i < len; ++i) {
        if (i)
            out.push_back(' ');
        out += words[rng.below(words.size())];
    }
    return out;
}

std::string perturb_text_surface(std::string_view text, std::uint64_t seed)
{
    Rng rng(mix_keys({seed, 0x5af3}));
    std::vector<std::string> words;
    std::istringstream ss{std::string(text)};
    for (std::string w; ss >> w;)
        words.push_back(w);

    std::string out;
    if (rng.bernoulli(0.3))
        out.append(1 + rng.below(2), ' ');
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i)
            out.append(rng.bernoulli(0.3) ? 2 + rng.below(2) : 1, ' ');
        std::string w = words[i];
        const double u = rng.uniform();
        if (u < 0.25) {
            for (char& c : w)
                c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        } else if (u < 0.6 && !w.empty()) {
            w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        }
        out += w;
    }
    if (rng.bernoulli(0.3))
        out.append(1 + rng.below(2), ' ');
    return out;
}

// ---------------------------------------------------------------------------
// Generator

namespace {

// One meme before ids are assigned.
struct Proto {
    MemeCategory category;
    int label;
    std::uint64_t image_key;
    bool image_copy = false;      // near-duplicate of image_key's base image
    std::uint64_t text_key;
    bool text_copy = false;       // same text as text_key's base, possibly re-surfaced
    std::size_t unit = 0;         // split-assignment unit
};

enum class UnitKind { triple, image_pair, text_pair, single, unimodal_member };

struct Unit {
    UnitKind kind;
    MemeCategory lead;
    std::vector<std::size_t> members; // proto indices
    Split split = Split::train;
};

void check_options(const GeneratorOptions& o)
{
    if (o.n < 10)
        throw Error(Errc::invalid_argument, "generate_dataset needs n >= 10");
    o.composition.validate();
    if (o.noise.image_amplitude < 0.0)
        throw Error(Errc::invalid_argument, "image perturbation amplitude must be >= 0");
    for (double p : {o.noise.text_perturb_prob, o.noise.label_noise, o.triple_overlap})
        if (!(p >= 0.0 && p <= 1.0))
            throw Error(Errc::invalid_argument, "generator probabilities must lie in [0, 1]");
    if (o.image_side < 8)
        throw Error(Errc::invalid_argument, "image side must be >= 8");
}

} // namespace

GeneratedDataset generate_dataset(const GeneratorOptions& options)
{
    check_options(options);
    const auto counts = composition_counts(options.n, options.composition);
    const std::size_t c_multi = counts[0], c_uni = counts[1], c_text = counts[2], c_img = counts[3],
                      c_rand = counts[4];

    Rng rng(mix_keys({options.seed, 0x9e4e}));
    std::set<std::string> used_texts;
    auto fresh_text_key = [&] {
        while (true) {
            const auto key = rng.next();
            if (used_texts.insert(synthetic_text(key)).second)
                return key;
        }
    };

    std::vector<Proto> protos;
    std::vector<Unit> units;
    auto add = [&](MemeCategory cat, int label, std::uint64_t img, bool img_copy, std::uint64_t txt,
                   bool txt_copy) {
        protos.push_back(Proto{cat, label, img, img_copy, txt, txt_copy, units.size() - 1});
        units.back().members.push_back(protos.size() - 1);
    };
    auto open_unit = [&](UnitKind kind, MemeCategory lead) { units.push_back(Unit{kind, lead, {}}); };

    const auto triples = std::min<std::size_t>(
        c_multi, static_cast<std::size_t>(std::floor(options.triple_overlap * std::min(c_text, c_img) + 1e-9)));
    std::size_t pivots_left = c_multi - triples;
    std::size_t img_left = c_img - triples;
    std::size_t text_left = c_text - triples;

    for (std::size_t i = 0; i < triples; ++i) {
        const auto img = rng.next();
        const auto txt = fresh_text_key();
        open_unit(UnitKind::triple, MemeCategory::multimodal_hate);
        add(MemeCategory::multimodal_hate, 1, img, false, txt, false);
        add(MemeCategory::benign_image_confounder, 0, img, true, fresh_text_key(), false);
        add(MemeCategory::benign_text_confounder, 0, rng.next(), false, txt, true);
    }
    const auto image_pairs = std::min(pivots_left, img_left);
    pivots_left -= image_pairs;
    img_left -= image_pairs;
    for (std::size_t i = 0; i < image_pairs; ++i) {
        const auto img = rng.next();
        open_unit(UnitKind::image_pair, MemeCategory::multimodal_hate);
        add(MemeCategory::multimodal_hate, 1, img, false, fresh_text_key(), false);
        add(MemeCategory::benign_image_confounder, 0, img, true, fresh_text_key(), false);
    }
    const auto text_pairs = std::min(pivots_left, text_left);
    pivots_left -= text_pairs;
    text_left -= text_pairs;
    for (std::size_t i = 0; i < text_pairs; ++i) {
        const auto txt = fresh_text_key();
        open_unit(UnitKind::text_pair, MemeCategory::multimodal_hate);
        add(MemeCategory::multimodal_hate, 1, rng.next(), false, txt, false);
        add(MemeCategory::benign_text_confounder, 0, rng.next(), false, txt, true);
    }
    auto singles = [&](MemeCategory cat, int label, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            open_unit(UnitKind::single, cat);
            add(cat, label, rng.next(), false, fresh_text_key(), false);
        }
    };
    singles(MemeCategory::multimodal_hate, 1, pivots_left);
    singles(MemeCategory::benign_image_confounder, 0, img_left);
    singles(MemeCategory::benign_text_confounder, 0, text_left);
    singles(MemeCategory::random_benign, 0, c_rand);

    // Unimodal hate: groups of 4 (remainder folded into the last group) sharing
    // one modality. Members get their own split so a signature seen in train
    // can recur in dev/test.
    std::vector<std::vector<std::size_t>> unimodal_protos;
    {
        std::vector<std::size_t> sizes;
        for (std::size_t left = c_uni; left > 0;) {
            const std::size_t take = left >= 4 ? 4 : left;
            if (take < 4 && !sizes.empty())
                sizes.back() += take;
            else
                sizes.push_back(take);
            left -= take;
        }
        for (auto size : sizes) {
            const bool share_image = rng.bernoulli(0.5);
            const auto img = rng.next();
            const auto txt = fresh_text_key();
            unimodal_protos.emplace_back();
            for (std::size_t m = 0; m < size; ++m) {
                open_unit(UnitKind::unimodal_member, MemeCategory::unimodal_hate);
                if (share_image)
                    add(MemeCategory::unimodal_hate, 1, img, m > 0, fresh_text_key(), false);
                else
                    add(MemeCategory::unimodal_hate, 1, rng.next(), false, txt, m > 0);
                unimodal_protos.back().push_back(protos.size() - 1);
            }
        }
    }

    // Splits: proportional within each (unit kind, lead category) stratum.
    {
        std::map<std::pair<int, int>, std::vector<std::size_t>> strata;
        for (std::size_t u = 0; u < units.size(); ++u)
            strata[{static_cast<int>(units[u].kind), static_cast<int>(units[u].lead)}].push_back(u);
        for (auto& [key, members] : strata) {
            rng.shuffle(members);
            const double g = static_cast<double>(members.size());
            const auto n_test = static_cast<std::size_t>(std::llround(0.10 * g));
            const auto n_dev = static_cast<std::size_t>(std::llround(0.05 * g));
            for (std::size_t i = 0; i < members.size(); ++i)
                units[members[i]].split = i < n_test ? Split::test : (i < n_test + n_dev ? Split::dev : Split::train);
        }
    }

    // Ids: a random permutation so construction order does not leak into ids.
    std::vector<MemeId> ids(protos.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        ids[i] = i;
    rng.shuffle(ids);

    const std::uint64_t content_seed = mix_keys({options.seed, 0xc0de});
    std::vector<GrayImage> proto_images(protos.size());
    std::vector<std::string> proto_texts(protos.size());
    std::vector<std::pair<std::size_t, std::size_t>> dup_pairs; // (source proto, copy proto)
    {
        std::map<std::uint64_t, std::size_t> image_source;
        std::map<std::uint64_t, std::size_t> text_source;
        for (std::size_t i = 0; i < protos.size(); ++i) {
            if (!protos[i].image_copy)
                image_source.emplace(protos[i].image_key, i);
            if (!protos[i].text_copy)
                text_source.emplace(protos[i].text_key, i);
        }
        for (std::size_t i = 0; i < protos.size(); ++i) {
            const auto& p = protos[i];
            const auto salt = mix_keys({content_seed, ids[i]});
            if (!p.image_copy) {
                proto_images[i] = synthetic_image(mix_keys({content_seed, p.image_key}), options.image_side);
            }
            proto_texts[i] = synthetic_text(p.text_key);
            if (p.text_copy && rng.bernoulli(options.noise.text_perturb_prob))
                proto_texts[i] = perturb_text_surface(proto_texts[i], salt);
        }
        for (std::size_t i = 0; i < protos.size(); ++i) {
            if (!protos[i].image_copy)
                continue;
            const auto src = image_source.at(protos[i].image_key);
            const GrayImage& base = proto_images[src];
            const auto base_hash = phash(base);
            const auto salt = mix_keys({content_seed, ids[i], 0xd0b1e});
            GrayImage copy;
            bool ok = false;
            for (std::uint64_t attempt = 0; attempt < 64 && !ok; ++attempt) {
                copy = perturb_text_band(base, options.noise.image_amplitude, salt + attempt);
                ok = hamming(base_hash, phash(copy)) <= options.self_check_radius;
            }
            if (!ok)
                throw Error(Errc::degenerate, "generator self-check: near-duplicate hash drifted past the radius");
            proto_images[i] = std::move(copy);
            dup_pairs.emplace_back(src, i);
        }
    }

    GeneratedDataset out;
    std::vector<std::size_t> order(protos.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });

    Rng label_rng(mix_keys({options.seed, 0x1abe1}));
    std::vector<int> noisy(protos.size());
    for (std::size_t i = 0; i < protos.size(); ++i) {
        noisy[i] = protos[i].label;
        if (label_rng.bernoulli(options.noise.label_noise))
            noisy[i] = 1 - noisy[i];
    }

    char ref[32];
    for (auto i : order) {
        std::snprintf(ref, sizeof ref, "images/%06llu.pgm", static_cast<unsigned long long>(ids[i]));
        out.records.push_back(MemeRecord{ids[i], ref, proto_texts[i], noisy[i], units[protos[i].unit].split});
        out.images.push_back(std::move(proto_images[i]));
        out.categories.push_back(protos[i].category);
        out.clean_labels.push_back(protos[i].label);
    }

    for (const auto& u : units) {
        if (u.kind == UnitKind::triple)
            out.triples.push_back({ids[u.members[0]], ids[u.members[1]], ids[u.members[2]]});
        else if (u.kind == UnitKind::image_pair)
            out.pairs.push_back({ids[u.members[0]], ids[u.members[1]], Modality::image});
        else if (u.kind == UnitKind::text_pair)
            out.pairs.push_back({ids[u.members[0]], ids[u.members[1]], Modality::text});
    }
    for (const auto& g : unimodal_protos) {
        std::vector<MemeId> members;
        for (auto p : g)
            members.push_back(ids[p]);
        std::sort(members.begin(), members.end());
        out.unimodal_groups.push_back(std::move(members));
    }
    for (auto [a, b] : dup_pairs)
        out.near_duplicates.emplace_back(ids[a], ids[b]);
    std::sort(out.triples.begin(), out.triples.end());
    std::sort(out.pairs.begin(), out.pairs.end());
    std::sort(out.near_duplicates.begin(), out.near_duplicates.end());
    return out;
}

GeneratedDataset generate_dataset(std::size_t n, const DatasetComposition& composition, const GeneratorNoise& noise,
                                  std::uint64_t seed)
{
    GeneratorOptions o;
    o.n = n;
    o.composition = composition;
    o.noise = noise;
    o.seed = seed;
    return generate_dataset(o);
}

void write_dataset(const GeneratedDataset& data, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir / "images", ec);
    if (ec)
        throw Error(Errc::io, "cannot create " + (dir / "images").string() + ": " + ec.message());
    for (std::size_t i = 0; i < data.records.size(); ++i)
        write_pgm(data.images[i], dir / data.records[i].image_ref);

    write_manifest(data.records, dir / "truth.jsonl");
    std::vector<MemeRecord> visible = data.records;
    for (auto& r : visible)
        if (r.split == Split::test)
            r.label.reset();
    write_manifest(visible, dir / "manifest.jsonl");
}

} // namespace memeconf
