#pragma once

#include "memeconf/clustering.hpp"
#include "memeconf/dataset.hpp"
#include "memeconf/metrics.hpp"
#include "memeconf/simulator.hpp"
#include "memeconf/tuples.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace memeconf {

enum class AdjustPlacement { before_stacking, after_stacking, off };

std::string_view to_string(AdjustPlacement p) noexcept;
AdjustPlacement parse_placement(std::string_view s);

struct PipelineConfig {
    std::filesystem::path outdir;
    std::filesystem::path manifest;  // empty: generate a synthetic corpus under outdir/data
    std::filesystem::path truth;     // labels for simulation and evaluation; empty: use manifest labels
    std::filesystem::path preds_dir; // non-empty: ingest base-model prediction files instead of simulating

    // synthetic corpus
    std::size_t n = 2000;
    DatasetComposition composition;
    GeneratorNoise noise;
    double triple_overlap = 1.0;

    std::uint64_t seed = 7;
    int threshold = kDefaultHammingThreshold;
    std::vector<Split> scope{Split::test}; // memes that are predicted, adjusted and scored

    std::size_t k = 5;
    std::size_t models = 4;
    std::optional<std::uint64_t> kfold_seed;
    SimulatorConfig sim; // sim.seed is overwritten by `seed`

    bool rule1 = true;
    bool pseudo_labels = true;
    AdjustPlacement rule2 = AdjustPlacement::before_stacking;
    bool unimodal = false;
    double hi = 1.0;
    double lo = 0.0;

    /// Rules and pseudo-labeling all disabled.
    static PipelineConfig baseline();
    void validate() const;
};

/// Flat "key = value" text; '#' starts a comment. Unknown keys are config errors.
void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view value);
PipelineConfig parse_config_text(std::string_view text, PipelineConfig base = {});
PipelineConfig read_config_file(const std::filesystem::path& path, PipelineConfig base = {});
std::vector<std::pair<std::string, std::string>> config_entries(const PipelineConfig& cfg);

struct PipelineResult {
    std::filesystem::path submission;
    std::optional<EvaluationReport> report; // absent when truth labels are unavailable
    std::vector<std::pair<std::string, double>> base_auroc; // per base model, before any adjustment
    TupleStats tuples;
    CorpusStats corpus;
    std::map<std::string, std::string> digests; // artifact path (relative to outdir) -> FNV-1a 64 hex
};

using LogFn = std::function<void(std::string_view)>;

/// hash -> cluster -> tuples -> rule-1 pseudo-labels -> per-fold, per-model
/// predictions -> rule 2 (before stacking) -> equal-weight stacking ->
/// rule 2 (after stacking) -> rule-1 override -> unimodal signatures ->
/// threshold -> evaluate. Every artifact is written under cfg.outdir. A failing
/// stage rethrows its Error with the stage name prefixed.
PipelineResult run_pipeline(const PipelineConfig& cfg, const LogFn& log = {});

std::string fnv1a_digest(const std::filesystem::path& file);

} // namespace memeconf
