#include "memeconf/metrics.hpp"

#include "memeconf/error.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace memeconf {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels)
{
    if (scores.size() != labels.size())
        throw Error(Errc::coverage_mismatch, "scores and labels differ in length");
    std::size_t pos = 0;
    for (int y : labels) {
        if (y != 0 && y != 1)
            throw Error(Errc::out_of_range, "labels must be 0 or 1");
        pos += static_cast<std::size_t>(y);
    }
    if (pos == 0 || pos == labels.size())
        throw Error(Errc::degenerate, "AUROC needs at least one positive and one negative");
}

// Indices sorted by descending score.
std::vector<std::size_t> descending(std::span<const double> scores)
{
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return idx;
}

} // namespace

double auroc(std::span<const double> scores, std::span<const int> labels)
{
    check_inputs(scores, labels);
    const auto idx = descending(scores);

    // Walk tie blocks from the top. Every positive in a block beats the
    // negatives below it and ties with the negatives inside it. Counts stay
    // integral (doubled) so the result is exact up to the final division.
    std::uint64_t neg_below = 0, pos_total = 0, neg_total = 0;
    for (int y : labels)
        (y ? pos_total : neg_total) += 1;
    std::uint64_t twice_credit = 0;
    std::uint64_t neg_seen = 0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        std::uint64_t pos_block = 0, neg_block = 0;
        while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
            (labels[idx[j]] ? pos_block : neg_block) += 1;
            ++j;
        }
        neg_seen += neg_block;
        neg_below = neg_total - neg_seen;
        twice_credit += pos_block * (2 * neg_below + neg_block);
        i = j;
    }
    return static_cast<double>(twice_credit) / (2.0 * static_cast<double>(pos_total) * static_cast<double>(neg_total));
}

namespace {

void flatten(const std::map<MemeId, double>& scores, const std::map<MemeId, int>& labels, std::vector<double>& s,
             std::vector<int>& y)
{
    for (const auto& [id, v] : scores) {
        const auto it = labels.find(id);
        if (it == labels.end())
            throw Error(Errc::coverage_mismatch, "no label for meme " + std::to_string(id));
        s.push_back(v);
        y.push_back(it->second);
    }
}

} // namespace

double auroc(const std::map<MemeId, double>& scores, const std::map<MemeId, int>& labels)
{
    std::vector<double> s;
    std::vector<int> y;
    flatten(scores, labels, s, y);
    return auroc(s, y);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels)
{
    check_inputs(scores, labels);
    const auto idx = descending(scores);
    double pos_total = 0, neg_total = 0;
    for (int y : labels)
        (y ? pos_total : neg_total) += 1;

    std::vector<RocPoint> curve{{0.0, 0.0}};
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
            (labels[idx[j]] ? tp : fp) += 1;
            ++j;
        }
        curve.push_back({static_cast<double>(fp) / neg_total, static_cast<double>(tp) / pos_total});
        i = j;
    }
    return curve;
}

double trapezoid_area(std::span<const RocPoint> curve)
{
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
    return area;
}

double accuracy(const std::map<MemeId, int>& predicted, const std::map<MemeId, int>& truth)
{
    if (predicted.empty())
        throw Error(Errc::degenerate, "accuracy of an empty prediction set");
    if (predicted.size() != truth.size())
        throw Error(Errc::coverage_mismatch, "predicted and true labels cover different ids");
    std::size_t hits = 0;
    for (const auto& [id, y] : predicted) {
        const auto it = truth.find(id);
        if (it == truth.end())
            throw Error(Errc::coverage_mismatch, "no true label for meme " + std::to_string(id));
        hits += y == it->second;
    }
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

EvaluationReport evaluate(const std::map<MemeId, double>& scores, const std::map<MemeId, int>& predicted,
                          const std::map<MemeId, int>& truth)
{
    std::map<MemeId, int> covered;
    for (const auto& [id, unused] : scores) {
        const auto it = truth.find(id);
        if (it == truth.end())
            throw Error(Errc::coverage_mismatch, "no true label for meme " + std::to_string(id));
        covered.emplace(id, it->second);
    }
    EvaluationReport r;
    r.auroc = auroc(scores, covered);
    r.accuracy = accuracy(predicted, covered);
    r.n = covered.size();
    for (const auto& [id, y] : covered)
        r.positives += static_cast<std::size_t>(y);
    return r;
}

std::string format_report(const EvaluationReport& r)
{
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "AUROC      %.4f\naccuracy   %.2f%%\nn          %zu (%zu positive)\n"
                  "{\"auroc\":%.6f,\"accuracy\":%.6f,\"n\":%zu,\"positives\":%zu}\n",
                  r.auroc, 100.0 * r.accuracy, r.n, r.positives, r.auroc, r.accuracy, r.n, r.positives);
    return buf;
}

} // namespace memeconf
