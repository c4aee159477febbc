#pragma once

#include "skge/kg.hpp"
#include "skge/models.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace skge {

using Rng = std::mt19937_64;

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 128;
    double learning_rate = 0.01;
    double margin = 1.0;
    std::size_t negatives_per_positive = 1;
    /// Unset: true for TransE, false otherwise.
    std::optional<bool> normalize_entities;
    /// Unset: 1e-3 for RESCAL, 0 otherwise.
    std::optional<double> l2_reg;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    /// A warning is recorded when RESCAL's m*d*d exceeds this.
    std::size_t rescal_parameter_budget = 50'000'000;

    bool resolved_normalize(Algorithm a) const { return normalize_entities.value_or(a == Algorithm::TransE); }
    double resolved_l2(Algorithm a) const { return l2_reg.value_or(a == Algorithm::RESCAL ? 1e-3 : 0.0); }
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double mean_loss = 0.0;
    /// Fraction of sampled (positive, negative) pairs with an active hinge.
    double violation_rate = 0.0;
    double seconds = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    std::vector<std::string> warnings;
};

std::string history_to_json(const TrainHistory& h);

/// Uniform entries in [-6/sqrt(d), 6/sqrt(d)], relation vectors L2-normalized
/// for TransE/HolE. Fully determined by config.seed. Throws ValidationError on
/// an empty graph.
EmbeddingModel init_model(const ModelConfig& config, const KnowledgeGraph& kg);

/// Corrupts head or tail (probability 1/2 each) with a uniformly drawn entity
/// different from the original. No filtering against known triples.
/// Throws ParameterError when fewer than two entities exist.
Triple sample_negative(std::size_t entity_count, const Triple& positive, Rng& rng);
inline Triple sample_negative(const KnowledgeGraph& kg, const Triple& positive, Rng& rng) {
    return sample_negative(kg.entity_count(), positive, rng);
}

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Margin-ranking SGD. With threads == 1 the result is a pure function of
/// (model, kg, config). With threads > 1 workers update rows without locking
/// and the outcome is not reproducible.
/// Throws NumericError naming epoch and batch if a parameter becomes NaN/Inf.
TrainHistory train(EmbeddingModel& model, const KnowledgeGraph& kg, const TrainConfig& config,
                   const EpochCallback& on_epoch = {});

}  // namespace skge
