#include "memeconf/ensemble.hpp"

#include "memeconf/error.hpp"
#include "memeconf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace memeconf {

KFoldPlan kfold(std::size_t n, std::size_t k, std::optional<std::uint64_t> shuffle_seed)
{
    if (k < 2 || k > n)
        throw Error(Errc::invalid_argument,
                    "k-fold needs 2 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (shuffle_seed) {
        Rng rng(mix_keys({*shuffle_seed, 0xf01d}));
        rng.shuffle(order);
    }

    KFoldPlan plan;
    plan.k = k;
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        Fold fold;
        fold.validation.assign(order.begin() + start, order.begin() + start + len);
        fold.train.assign(order.begin(), order.begin() + start);
        fold.train.insert(fold.train.end(), order.begin() + start + len, order.end());
        std::sort(fold.validation.begin(), fold.validation.end());
        std::sort(fold.train.begin(), fold.train.end());
        plan.folds.push_back(std::move(fold));
        start += len;
    }
    return plan;
}

std::string format_kfold(const KFoldPlan& plan)
{
    std::string out;
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        const auto& v = plan.folds[f].validation;
        out += "fold=" + std::to_string(f) + " train_size=" + std::to_string(plan.folds[f].train.size()) +
               " validation_size=" + std::to_string(v.size()) + " validation=";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i)
                out += ',';
            out += std::to_string(v[i]);
        }
        out += '\n';
    }
    return out;
}

StackedPrediction threshold_scores(const std::map<MemeId, double>& scores, std::size_t source_count)
{
    StackedPrediction out;
    out.mean_score = scores;
    out.source_count = source_count;
    for (const auto& [id, s] : scores)
        out.label.emplace(id, s >= kDecisionThreshold ? 1 : 0);
    return out;
}

StackedPrediction stack_equal_weight(std::span<const PredictionSet> sets)
{
    if (sets.empty())
        throw Error(Errc::invalid_argument, "stacking needs at least one prediction set");
    const auto& reference = sets.front().scores;
    for (const auto& s : sets) {
        validate_scores(s);
        if (s.scores.size() != reference.size() ||
            !std::equal(s.scores.begin(), s.scores.end(), reference.begin(),
                        [](const auto& a, const auto& b) { return a.first == b.first; }))
            throw Error(Errc::coverage_mismatch,
                        "prediction set '" + s.model_id + "' covers different ids than '" + sets.front().model_id + "'");
    }

    // Sorting the per-id values before a compensated sum makes the mean
    // independent of the order of `sets`.
    std::vector<std::map<MemeId, double>::const_iterator> cursors;
    for (const auto& s : sets)
        cursors.push_back(s.scores.begin());
    std::vector<double> values(sets.size());
    std::map<MemeId, double> mean;
    for (const auto& [id, unused] : reference) {
        for (std::size_t m = 0; m < sets.size(); ++m)
            values[m] = (cursors[m]++)->second;
        std::sort(values.begin(), values.end());
        double sum = 0.0, comp = 0.0;
        for (double v : values) {
            const double t = sum + v;
            comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
            sum = t;
        }
        const double m = (sum + comp) / static_cast<double>(values.size());
        mean.emplace_hint(mean.end(), id, std::clamp(m, values.front(), values.back()));
    }
    return threshold_scores(mean, sets.size());
}

PredictionSet as_prediction_set(const StackedPrediction& stacked, std::string model_id)
{
    return PredictionSet{std::move(model_id), stacked.mean_score};
}

} // namespace memeconf
