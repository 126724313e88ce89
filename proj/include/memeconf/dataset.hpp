#pragma once

#include "memeconf/hamming_index.hpp"
#include "memeconf/image.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memeconf {

enum class Split { train, dev, test };
enum class Modality { image, text };

std::string_view to_string(Split s) noexcept;
std::string_view to_string(Modality m) noexcept;
Split parse_split(std::string_view s);
/// Comma-separated split list, e.g. "dev,test".
std::vector<Split> parse_split_list(std::string_view s);

struct MemeRecord {
    MemeId id = 0;
    std::string image_ref; // relative to the manifest's directory
    std::string text;
    std::optional<int> label; // 0 = non-hateful, 1 = hateful
    Split split = Split::train;

    bool operator==(const MemeRecord&) const = default;
};

/// Unique ids; labels in {0, 1}; every train record labeled.
void validate_records(std::span<const MemeRecord> records);

// Manifest: one JSON object per line with keys id, img, text, label (optional), split.
std::vector<MemeRecord> parse_manifest(std::istream& in);
std::vector<MemeRecord> read_manifest(const std::filesystem::path& path);
void write_manifest(std::span<const MemeRecord> records, std::ostream& out);
void write_manifest(std::span<const MemeRecord> records, const std::filesystem::path& path);

std::vector<MemeRecord> filter_splits(std::span<const MemeRecord> records, std::span<const Split> splits);

struct DatasetComposition {
    double multimodal_hate = 0.40;
    double unimodal_hate = 0.10;
    double benign_text_confounder = 0.20;
    double benign_image_confounder = 0.20;
    double random_benign = 0.10;

    void validate() const;
    /// "a,b,c,d,e" in the field order above.
    static DatasetComposition parse(std::string_view text);
};

struct GeneratorNoise {
    double image_amplitude = 4.0;  // near-duplicate text-band perturbation, intensity units
    double text_perturb_prob = 0.5;
    double label_noise = 0.0;      // per-meme label flip probability
};

struct GeneratorOptions {
    std::size_t n = 2000;
    DatasetComposition composition;
    GeneratorNoise noise;
    std::uint64_t seed = 0;
    /// Share of the smaller confounder pool attached to pivots that also get the
    /// other confounder. 1.0 builds as many three-member groups as possible;
    /// lower values leave pivot/confounder pairs behind.
    double triple_overlap = 1.0;
    std::size_t image_side = 64;
    /// Regenerate a near-duplicate when its hash drifts beyond this radius.
    int self_check_radius = 10;
};

enum class MemeCategory { multimodal_hate, unimodal_hate, benign_text_confounder, benign_image_confounder, random_benign };

struct ConstructedTriple {
    MemeId pivot = 0;
    MemeId image_partner = 0;
    MemeId text_partner = 0;
    auto operator<=>(const ConstructedTriple&) const = default;
};

struct ConstructedPair {
    MemeId pivot = 0;
    MemeId partner = 0;
    Modality shared = Modality::image;
    auto operator<=>(const ConstructedPair&) const = default;
};

struct GeneratedDataset {
    std::vector<MemeRecord> records;        // sorted by id, every record labeled
    std::vector<GrayImage> images;          // images[i] belongs to records[i]
    std::vector<MemeCategory> categories;   // aligned with records
    std::vector<int> clean_labels;          // labels before label noise
    std::vector<ConstructedTriple> triples;
    std::vector<ConstructedPair> pairs;
    std::vector<std::vector<MemeId>> unimodal_groups;
    std::vector<std::pair<MemeId, MemeId>> near_duplicates;
};

/// Per-category counts: floor(n * frac) for the first four, remainder to random benign.
std::array<std::size_t, 5> composition_counts(std::size_t n, const DatasetComposition& c);

GeneratedDataset generate_dataset(const GeneratorOptions& options);
GeneratedDataset generate_dataset(std::size_t n, const DatasetComposition& composition,
                                  const GeneratorNoise& noise, std::uint64_t seed);

/// Writes images/<id>.pgm, manifest.jsonl (test labels withheld) and
/// truth.jsonl (all labels) under `dir`.
void write_dataset(const GeneratedDataset& data, const std::filesystem::path& dir);

// Building blocks of the generator, exposed for robustness tests.
GrayImage synthetic_image(std::uint64_t seed, std::size_t side);
GrayImage perturb_text_band(const GrayImage& img, double amplitude, std::uint64_t seed);
std::string synthetic_text(std::uint64_t seed);
std::string perturb_text_surface(std::string_view text, std::uint64_t seed);

} // namespace memeconf
