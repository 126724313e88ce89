#pragma once

#include "memeconf/clustering.hpp"
#include "memeconf/dataset.hpp"
#include "memeconf/predictions.hpp"
#include "memeconf/tuples.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace memeconf {

struct PseudoLabel {
    int label = 0;
    std::string provenance; // rule that produced it, e.g. "rule1"
    bool operator==(const PseudoLabel&) const = default;
};

struct PseudoLabelSet {
    std::map<MemeId, PseudoLabel> labels;
    bool operator==(const PseudoLabelSet&) const = default;
};

/// ThreeTuple scores become (pivot 1, image partner 0, text partner 0).
/// Throws Errc::missing_id when a tuple member has no score.
PredictionSet apply_rule1(std::span<const TupleGroup> groups, const PredictionSet& preds);

/// Pivot 1, partners 0, provenance "rule1".
PseudoLabelSet rule1_pseudo_labels(std::span<const TupleGroup> groups);

/// For each TwoTuple the higher-scored member gets `hi`, the other `lo`;
/// an exact tie leaves both untouched. Requires 0 <= lo < hi <= 1.
PredictionSet apply_rule2(std::span<const TupleGroup> groups, const PredictionSet& preds, double hi = 1.0,
                          double lo = 0.0);

/// Scores 1.0 for every meme whose image or text cluster carries an
/// UnimodalHate signature. Non-signature groups in `signatures` are ignored.
PredictionSet apply_unimodal_signatures(std::span<const TupleGroup> signatures, const ClusterAssignment& assignment,
                                        const PredictionSet& preds);

/// train + the pseudo-labeled test records re-tagged as train.
/// Throws Errc::duplicate_id on a collision with an existing train id and
/// Errc::missing_id when a pseudo label has no test record.
std::vector<MemeRecord> merge_pseudo_labels(std::span<const MemeRecord> train, const PseudoLabelSet& pseudo,
                                            std::span<const MemeRecord> test);

// Pseudo-label file: header "id,label,provenance".
void write_pseudo_labels(const PseudoLabelSet& pseudo, const std::filesystem::path& path);
PseudoLabelSet read_pseudo_labels(const std::filesystem::path& path);

} // namespace memeconf
