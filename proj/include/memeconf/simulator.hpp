#pragma once

#include "memeconf/dataset.hpp"
#include "memeconf/predictions.hpp"
#include "memeconf/rules.hpp"
#include "memeconf/tuples.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace memeconf {

enum class Difficulty { three_tuple, two_tuple, unimodal, independent };

struct DifficultyDiscount {
    double three_tuple = 0.25;
    double two_tuple = 0.35;
    double unimodal = 0.8;
    double independent = 1.0;

    double of(Difficulty d) const noexcept;
};

/// Stand-in for a fine-tuned base model:
///   score = logistic(mu * discount(category) * boost(id) * (2y - 1) + noise)
/// noise = sigma * (sqrt(rho) * z_meme + sqrt(1 - rho) * z_model), where
/// z_meme is shared by every model (how hard the meme is) and z_model is
/// private to one model. Both are counter-seeded from (seed, model, id).
struct SimulatorConfig {
    double separation_mu = 1.0;
    double sigma = 1.2;
    DifficultyDiscount discount;
    double pseudo_label_boost = 3.0;
    double shared_noise = 0.9; // rho
    std::uint64_t seed = 0;

    void validate() const;
};

/// ThreeTuple > TwoTuple > UnimodalHate membership; everything else independent.
std::map<MemeId, Difficulty> difficulty_map(std::span<const TupleGroup> groups);

PredictionSet simulate_predictions(std::span<const MemeRecord> memes, std::span<const TupleGroup> groups,
                                   const PseudoLabelSet* pseudo, const SimulatorConfig& cfg, int model_index);

struct SimulationJob {
    int model_index = 0;
    const PseudoLabelSet* pseudo = nullptr;
};

// One PredictionSet per job. simulate_batch spreads jobs over OpenMP threads;
// the serial version is the reference used by tests.
std::vector<PredictionSet> simulate_batch(std::span<const MemeRecord> memes, std::span<const TupleGroup> groups,
                                          const SimulatorConfig& cfg, std::span<const SimulationJob> jobs);
std::vector<PredictionSet> simulate_batch_serial(std::span<const MemeRecord> memes,
                                                 std::span<const TupleGroup> groups, const SimulatorConfig& cfg,
                                                 std::span<const SimulationJob> jobs);

} // namespace memeconf
