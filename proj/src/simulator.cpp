#include "memeconf/simulator.hpp"

#include "memeconf/error.hpp"
#include "memeconf/rng.hpp"

#include <cmath>
#include <exception>

namespace memeconf {

double DifficultyDiscount::of(Difficulty d) const noexcept
{
    switch (d) {
    case Difficulty::three_tuple: return three_tuple;
    case Difficulty::two_tuple: return two_tuple;
    case Difficulty::unimodal: return unimodal;
    case Difficulty::independent: return independent;
    }
    return independent;
}

void SimulatorConfig::validate() const
{
    if (!(sigma > 0.0))
        throw Error(Errc::invalid_argument, "simulator sigma must be > 0");
    for (double m : {discount.three_tuple, discount.two_tuple, discount.unimodal, discount.independent,
                     pseudo_label_boost})
        if (!(m >= 0.0))
            throw Error(Errc::invalid_argument, "simulator multipliers must be >= 0");
    if (!(shared_noise >= 0.0 && shared_noise <= 1.0))
        throw Error(Errc::invalid_argument, "simulator shared_noise must lie in [0, 1]");
}

std::map<MemeId, Difficulty> difficulty_map(std::span<const TupleGroup> groups)
{
    std::map<MemeId, Difficulty> out;
    auto mark = [&](MemeId id, Difficulty d) {
        auto [it, fresh] = out.emplace(id, d);
        if (!fresh && static_cast<int>(d) < static_cast<int>(it->second))
            it->second = d;
    };
    for (const auto& g : groups) {
        Difficulty d = Difficulty::independent;
        if (std::holds_alternative<ThreeTuple>(g))
            d = Difficulty::three_tuple;
        else if (std::holds_alternative<TwoTuple>(g))
            d = Difficulty::two_tuple;
        else if (std::holds_alternative<UnimodalHate>(g))
            d = Difficulty::unimodal;
        else
            continue;
        for (auto id : group_members(g))
            mark(id, d);
    }
    return out;
}

namespace {

constexpr std::uint64_t kSharedStream = 0x5ba7ed;
constexpr std::uint64_t kModelStream = 0x30de1;

PredictionSet simulate_with(std::span<const MemeRecord> memes, const std::map<MemeId, Difficulty>& difficulty,
                            const PseudoLabelSet* pseudo, const SimulatorConfig& cfg, int model_index)
{
    PredictionSet out;
    out.model_id = "sim-" + std::to_string(model_index);
    const double w_shared = std::sqrt(cfg.shared_noise);
    const double w_model = std::sqrt(1.0 - cfg.shared_noise);
    const auto model = static_cast<std::uint64_t>(model_index);
    for (const auto& r : memes) {
        if (!r.label)
            throw Error(Errc::missing_field, "simulation needs true labels; meme " + std::to_string(r.id) +
                                                 " is unlabeled");
        const auto it = difficulty.find(r.id);
        const double discount = cfg.discount.of(it == difficulty.end() ? Difficulty::independent : it->second);
        const double boost = pseudo && pseudo->labels.contains(r.id) ? cfg.pseudo_label_boost : 1.0;
        const double z_meme = normal_from_bits(mix_keys({cfg.seed, kSharedStream, r.id, 0}),
                                               mix_keys({cfg.seed, kSharedStream, r.id, 1}));
        const double z_model = normal_from_bits(mix_keys({cfg.seed, kModelStream, model, r.id, 0}),
                                                mix_keys({cfg.seed, kModelStream, model, r.id, 1}));
        const double sign = *r.label == 1 ? 1.0 : -1.0;
        const double logit =
            cfg.separation_mu * discount * boost * sign + cfg.sigma * (w_shared * z_meme + w_model * z_model);
        out.scores.emplace(r.id, 1.0 / (1.0 + std::exp(-logit)));
    }
    return out;
}

} // namespace

PredictionSet simulate_predictions(std::span<const MemeRecord> memes, std::span<const TupleGroup> groups,
                                   const PseudoLabelSet* pseudo, const SimulatorConfig& cfg, int model_index)
{
    cfg.validate();
    return simulate_with(memes, difficulty_map(groups), pseudo, cfg, model_index);
}

std::vector<PredictionSet> simulate_batch_serial(std::span<const MemeRecord> memes,
                                                 std::span<const TupleGroup> groups, const SimulatorConfig& cfg,
                                                 std::span<const SimulationJob> jobs)
{
    cfg.validate();
    const auto difficulty = difficulty_map(groups);
    std::vector<PredictionSet> out;
    for (const auto& job : jobs)
        out.push_back(simulate_with(memes, difficulty, job.pseudo, cfg, job.model_index));
    return out;
}

std::vector<PredictionSet> simulate_batch(std::span<const MemeRecord> memes, std::span<const TupleGroup> groups,
                                          const SimulatorConfig& cfg, std::span<const SimulationJob> jobs)
{
    cfg.validate();
    const auto difficulty = difficulty_map(groups);
    std::vector<PredictionSet> out(jobs.size());
    std::exception_ptr failure;
    const auto n = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        try {
            out[j] = simulate_with(memes, difficulty, jobs[j].pseudo, cfg, jobs[j].model_index);
        } catch (...) {
#pragma omp critical
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

} // namespace memeconf
