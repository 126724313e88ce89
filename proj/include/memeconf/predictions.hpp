#pragma once

#include "memeconf/hamming_index.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace memeconf {

/// One model's hateful-probability per meme. Every score lies in [0, 1].
struct PredictionSet {
    std::string model_id;
    std::map<MemeId, double> scores;

    bool operator==(const PredictionSet&) const = default;
};

/// Throws Errc::out_of_range for a score outside [0, 1] (or NaN).
void validate_scores(const PredictionSet& preds);

// Prediction file: header "id,proba", one row per meme. Probabilities are
// written as the shortest decimal that reads back bit-identically.
PredictionSet read_predictions(const std::filesystem::path& path);
void write_predictions(const PredictionSet& preds, const std::filesystem::path& path);

struct StackedPrediction;
// Submission file: header "id,proba,label".
void write_submission(const StackedPrediction& stacked, const std::filesystem::path& path);
StackedPrediction read_submission(const std::filesystem::path& path);

} // namespace memeconf
