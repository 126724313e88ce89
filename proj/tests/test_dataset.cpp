#include "memeconf/clustering.hpp"
#include "memeconf/dataset.hpp"
#include "memeconf/error.hpp"
#include "memeconf/phash.hpp"
#include "memeconf/tuples.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

using namespace memeconf;
namespace fs = std::filesystem;

namespace {

Errc error_code(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a memeconf::Error");
    return Errc::io;
}

std::vector<MemeRecord> parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_manifest(in);
}

} // namespace

TEST_CASE("manifest parses records in file order")
{
    const auto r = parse(R"({"id": 3, "img": "img/3.pgm", "text": "hello there", "label": 1, "split": "train"}
{"id": 1, "img": "img/1.pgm", "text": "second", "label": 0, "split": "dev"}
{"id": 2, "img": "img/2.pgm", "text": "third", "split": "test"}
)");
    REQUIRE(r.size() == 3);
    CHECK(r[0].id == 3);
    CHECK(r[0].label == 1);
    CHECK(r[1].split == Split::dev);
    CHECK(r[2].split == Split::test);
    CHECK_FALSE(r[2].label.has_value());
    CHECK(r[2].image_ref == "img/2.pgm");
}

TEST_CASE("manifest rejects duplicates, missing labels and malformed lines")
{
    CHECK(error_code([] {
              parse(R"({"id": 5, "img": "a", "text": "x", "label": 1, "split": "train"}
{"id": 5, "img": "b", "text": "y", "label": 0, "split": "dev"})");
          }) == Errc::duplicate_id);
    CHECK(error_code([] { parse(R"({"id": 1, "img": "a", "text": "x", "split": "train"})"); }) ==
          Errc::missing_field);
    CHECK(error_code([] { parse(R"({"id": 1, "img": "a", "split": "dev"})"); }) == Errc::missing_field);
    CHECK(error_code([] { parse(R"({"id": 1, "img": "a", "text": "x", "label": 2, "split": "dev"})"); }) ==
          Errc::parse);
    CHECK(error_code([] { parse(R"({"id": -4, "img": "a", "text": "x", "split": "dev"})"); }) == Errc::parse);
    CHECK(error_code([] { parse(R"({"id": 1, "img": "a", "text": "x", "split": "holdout"})"); }) == Errc::parse);
    CHECK(error_code([] { parse("{not json"); }) == Errc::parse);
    CHECK(parse("\n  \n").empty());
}

TEST_CASE("manifest write/read round trip")
{
    std::vector<MemeRecord> records{
        {7, "images/000007.pgm", "say \"what\"\tnow", 1, Split::train},
        {2, "images/000002.pgm", "caf\xc3\xa9", std::nullopt, Split::test},
        {9, "images/000009.pgm", "", 0, Split::dev},
    };
    std::ostringstream out;
    write_manifest(records, out);
    std::istringstream in(out.str());
    CHECK(parse_manifest(in) == records);

    std::ostringstream empty;
    write_manifest(std::vector<MemeRecord>{}, empty);
    CHECK(empty.str().empty());

    records.push_back(records.front());
    std::ostringstream dup;
    CHECK(error_code([&] { write_manifest(records, dup); }) == Errc::duplicate_id);
}

TEST_CASE("split lists")
{
    CHECK(parse_split_list("dev,test") == std::vector<Split>{Split::dev, Split::test});
    CHECK(parse_split_list(" train ") == std::vector<Split>{Split::train});
    CHECK(error_code([] { parse_split_list(""); }) == Errc::invalid_argument);
}

TEST_CASE("composition counts follow the stated fractions")
{
    CHECK(composition_counts(100, DatasetComposition{}) == std::array<std::size_t, 5>{40, 10, 20, 20, 10});
    const auto c = composition_counts(2003, DatasetComposition{});
    CHECK(c[0] + c[1] + c[2] + c[3] + c[4] == 2003);
    CHECK(DatasetComposition::parse("0.4,0.1,0.2,0.2,0.1").multimodal_hate == doctest::Approx(0.4));
    CHECK(error_code([] { DatasetComposition::parse("0.5,0.5"); }) == Errc::invalid_argument);
    CHECK(error_code([] { DatasetComposition::parse("0.5,0.5,0.5,0,0"); }) == Errc::invalid_argument);
    CHECK(error_code([] { DatasetComposition::parse("a,b,c,d,e"); }) == Errc::invalid_argument);
}

TEST_CASE("generator categories and labels")
{
    const auto data = generate_dataset(100, DatasetComposition{}, GeneratorNoise{}, 3);
    REQUIRE(data.records.size() == 100);
    std::array<std::size_t, 5> counts{};
    for (auto c : data.categories)
        ++counts[static_cast<std::size_t>(c)];
    CHECK(counts == std::array<std::size_t, 5>{40, 10, 20, 20, 10});
    CHECK(data.triples.size() == 20);
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        const bool hateful = data.categories[i] == MemeCategory::multimodal_hate ||
                             data.categories[i] == MemeCategory::unimodal_hate;
        CHECK(data.records[i].label == (hateful ? 1 : 0));
    }
    CHECK(std::is_sorted(data.records.begin(), data.records.end(),
                         [](const auto& a, const auto& b) { return a.id < b.id; }));

    const auto all_hate = generate_dataset(10, DatasetComposition{1, 0, 0, 0, 0}, GeneratorNoise{}, 1);
    for (const auto& r : all_hate.records)
        CHECK(r.label == 1);
}

TEST_CASE("generator is deterministic per seed")
{
    const auto a = generate_dataset(200, DatasetComposition{}, GeneratorNoise{}, 9);
    const auto b = generate_dataset(200, DatasetComposition{}, GeneratorNoise{}, 9);
    const auto c = generate_dataset(200, DatasetComposition{}, GeneratorNoise{}, 10);
    CHECK(a.records == b.records);
    CHECK(a.images == b.images);
    CHECK(a.triples == b.triples);
    CHECK(a.records != c.records);
}

TEST_CASE("label noise flips roughly the requested share")
{
    GeneratorOptions opt;
    opt.n = 4000;
    opt.seed = 2;
    opt.noise.label_noise = 0.05;
    const auto data = generate_dataset(opt);
    std::size_t flipped = 0;
    for (std::size_t i = 0; i < data.records.size(); ++i)
        flipped += *data.records[i].label != data.clean_labels[i];
    CHECK(double(flipped) / 4000.0 == doctest::Approx(0.05).epsilon(0.3));
}

TEST_CASE("constructed 3-tuples are recovered on a small corpus")
{
    const auto data = generate_dataset(100, DatasetComposition{}, GeneratorNoise{}, 21);
    const auto hashes = hash_images(data.images);
    std::vector<HashEntry> entries;
    for (std::size_t i = 0; i < data.records.size(); ++i)
        entries.push_back({data.records[i].id, hashes[i]});
    const auto assignment = assign_clusters(data.records, entries, kDefaultHammingThreshold);
    std::set<ConstructedTriple> found;
    for (const auto& g : detect_tuples(data.records, assignment))
        if (const auto* t = std::get_if<ThreeTuple>(&g))
            found.insert({t->pivot, t->image_partner, t->text_partner});
    std::size_t hit = 0;
    for (const auto& t : data.triples)
        hit += found.contains(t);
    CHECK(double(hit) / double(data.triples.size()) >= 0.95);

    // Same-text pairs share a text cluster whatever the surface perturbation.
    for (const auto& t : data.triples)
        CHECK(assignment.at(t.pivot).text == assignment.at(t.text_partner).text);
}

TEST_CASE("near-duplicate images stay within the default radius")
{
    int within = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const auto img = synthetic_image(s, 64);
        const auto dup = perturb_text_band(img, GeneratorNoise{}.image_amplitude, s + 77777);
        within += hamming(phash(img), phash(dup)) <= kDefaultHammingThreshold;
    }
    CHECK(within >= 990);
}

TEST_CASE("distinct synthetic images are far apart")
{
    int close = 0;
    for (std::uint64_t s = 0; s < 300; ++s)
        close += hamming(phash(synthetic_image(2 * s, 64)), phash(synthetic_image(2 * s + 1, 64))) <=
                 kDefaultHammingThreshold;
    CHECK(close <= 3);
}

TEST_CASE("write_dataset withholds test labels from the manifest only")
{
    const auto dir = fs::temp_directory_path() / "memeconf_test_dataset";
    fs::remove_all(dir);
    const auto data = generate_dataset(60, DatasetComposition{}, GeneratorNoise{}, 4);
    write_dataset(data, dir);
    const auto manifest = read_manifest(dir / "manifest.jsonl");
    const auto truth = read_manifest(dir / "truth.jsonl");
    REQUIRE(manifest.size() == 60);
    CHECK(truth == data.records);
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        CHECK(manifest[i].label.has_value() == (manifest[i].split != Split::test));
        CHECK(fs::exists(dir / manifest[i].image_ref));
    }
    CHECK(read_pnm(dir / manifest[0].image_ref) == data.images[0]);
    fs::remove_all(dir);
}

TEST_CASE("generator argument checks")
{
    GeneratorOptions opt;
    opt.n = 5;
    CHECK(error_code([&] { generate_dataset(opt); }) == Errc::invalid_argument);
    opt.n = 100;
    opt.noise.label_noise = 1.5;
    CHECK(error_code([&] { generate_dataset(opt); }) == Errc::invalid_argument);
}
