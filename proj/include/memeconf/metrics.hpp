#pragma once

#include "memeconf/hamming_index.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace memeconf {

struct EvaluationReport {
    double auroc = 0.0;
    double accuracy = 0.0;
    std::size_t n = 0;
    std::size_t positives = 0;
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    bool operator==(const RocPoint&) const = default;
};

/// Probability that a random positive outscores a random negative, ties
/// credited one half (Mann-Whitney). Throws Errc::degenerate for one class.
double auroc(std::span<const double> scores, std::span<const int> labels);
double auroc(const std::map<MemeId, double>& scores, const std::map<MemeId, int>& labels);

/// Staircase from (0,0) to (1,1), one point per distinct score threshold.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);
double trapezoid_area(std::span<const RocPoint> curve);

/// Fraction of ids where the predicted label equals the true label.
double accuracy(const std::map<MemeId, int>& predicted, const std::map<MemeId, int>& truth);

/// AUROC and accuracy over the ids of `scores`; `truth` must cover them.
EvaluationReport evaluate(const std::map<MemeId, double>& scores, const std::map<MemeId, int>& predicted,
                          const std::map<MemeId, int>& truth);

/// Aligned text followed by one JSON line.
std::string format_report(const EvaluationReport& report);

} // namespace memeconf
