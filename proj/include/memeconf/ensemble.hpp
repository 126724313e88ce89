#pragma once

#include "memeconf/predictions.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace memeconf {

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    bool operator==(const Fold&) const = default;
};

/// k validation folds partitioning [0, n). Sizes differ by at most one, the
/// first n mod k folds being the larger ones. Folds are consecutive ranges
/// of the index order, which is a seeded permutation when a seed is given.
struct KFoldPlan {
    std::size_t k = 0;
    std::vector<Fold> folds;
    bool operator==(const KFoldPlan&) const = default;
};

KFoldPlan kfold(std::size_t n, std::size_t k, std::optional<std::uint64_t> shuffle_seed = std::nullopt);
std::string format_kfold(const KFoldPlan& plan);

inline constexpr double kDecisionThreshold = 0.5;

struct StackedPrediction {
    std::map<MemeId, double> mean_score;
    std::map<MemeId, int> label; // 1 iff mean_score >= 0.5
    std::size_t source_count = 0;

    bool operator==(const StackedPrediction&) const = default;
};

/// Per-id arithmetic mean over all sets, then label = (mean >= 0.5).
/// All sets must cover the same ids (Errc::coverage_mismatch otherwise).
StackedPrediction stack_equal_weight(std::span<const PredictionSet> sets);

/// Labels an already-averaged score map; used after post-stacking adjustments.
StackedPrediction threshold_scores(const std::map<MemeId, double>& scores, std::size_t source_count);

PredictionSet as_prediction_set(const StackedPrediction& stacked, std::string model_id = "stacked");

} // namespace memeconf
