#include "skge/train.hpp"

#include "skge/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace skge {

std::string history_to_json(const TrainHistory& h) {
    nlohmann::ordered_json j;
    j["epochs"] = nlohmann::ordered_json::array();
    for (const auto& e : h.epochs)
        j["epochs"].push_back({{"epoch", e.epoch},
                               {"mean_loss", e.mean_loss},
                               {"violation_rate", e.violation_rate},
                               {"seconds", e.seconds}});
    j["warnings"] = h.warnings;
    return j.dump(2) + "\n";
}

EmbeddingModel init_model(const ModelConfig& config, const KnowledgeGraph& kg) {
    if (kg.empty() || kg.entity_count() == 0)
        throw ValidationError("cannot initialize a model for an empty knowledge graph");
    EmbeddingModel model(config, kg.entity_count(), kg.relation_count());
    const double bound = 6.0 / std::sqrt(static_cast<double>(config.dimension));
    Rng rng(config.seed);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& x : model.entity_data())
        x = dist(rng);
    for (auto& x : model.relation_data())
        x = dist(rng);
    if (model.has_vector_relations()) {
        for (RelationId r = 0; r < model.relation_count(); ++r) {
            auto row = model.relation(r);
            double norm = 0.0;
            for (double x : row)
                norm += x * x;
            norm = std::sqrt(norm);
            if (norm > 0.0)
                for (auto& x : row)
                    x /= norm;
        }
    }
    return model;
}

Triple sample_negative(std::size_t entity_count, const Triple& positive, Rng& rng) {
    if (entity_count < 2)
        throw ParameterError("negative sampling needs at least two entities");
    std::bernoulli_distribution corrupt_head(0.5);
    std::uniform_int_distribution<std::size_t> pick(0, entity_count - 2);
    Triple neg = positive;
    EntityId& slot = corrupt_head(rng) ? neg.head : neg.tail;
    // Draw from n-1 values and skip over the original.
    auto e = static_cast<EntityId>(pick(rng));
    slot = e >= slot ? e + 1 : e;
    return neg;
}

namespace {

void project_unit_ball(std::span<double> row) {
    double norm = 0.0;
    for (double x : row)
        norm += x * x;
    if (norm > 1.0) {
        const double s = 1.0 / std::sqrt(norm);
        for (auto& x : row)
            x *= s;
    }
}

bool finite(std::span<const double> row) {
    return std::all_of(row.begin(), row.end(), [](double x) { return std::isfinite(x); });
}

struct StepContext {
    EmbeddingModel& model;
    double lr;
    double l2;
    bool normalize;
};

// Returns false if an updated row is no longer finite.
bool apply_step(const StepContext& ctx, const SparseGradient& g) {
    bool ok = true;
    for (const auto& row : g.entities) {
        auto p = ctx.model.entity(row.id);
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] -= ctx.lr * (row.values[i] + ctx.l2 * p[i]);
        if (ctx.normalize)
            project_unit_ball(p);
        ok = ok && finite(p);
    }
    for (const auto& row : g.relations) {
        auto p = ctx.model.relation(row.id);
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] -= ctx.lr * (row.values[i] + ctx.l2 * p[i]);
        ok = ok && finite(p);
    }
    return ok;
}

struct ShardTotals {
    double loss = 0.0;
    std::size_t pairs = 0;
    std::size_t violations = 0;
};

// Processes order[begin, end) in batches. Batch numbering is global so
// diagnostics stay meaningful across shards.
ShardTotals run_shard(const StepContext& ctx, const KnowledgeGraph& kg, const TrainConfig& cfg,
                      const std::vector<std::size_t>& order, std::size_t begin, std::size_t end, Rng& rng,
                      std::size_t epoch) {
    ShardTotals totals;
    const auto& triples = kg.triples();
    for (std::size_t pos = begin; pos < end; ++pos) {
        const Triple& positive = triples[order[pos]];
        for (std::size_t k = 0; k < cfg.negatives_per_positive; ++k) {
            const Triple negative = sample_negative(kg.entity_count(), positive, rng);
            auto lg = loss_and_grad(ctx.model, positive, negative, cfg.margin);
            ++totals.pairs;
            if (lg.loss > 0.0) {
                ++totals.violations;
                totals.loss += lg.loss;
            }
            if (!lg.gradient.empty() && !apply_step(ctx, lg.gradient))
                throw NumericError("non-finite parameter at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(pos / cfg.batch_size + 1));
        }
    }
    return totals;
}

}  // namespace

TrainHistory train(EmbeddingModel& model, const KnowledgeGraph& kg, const TrainConfig& cfg,
                   const EpochCallback& on_epoch) {
    if (cfg.epochs < 1)
        throw ParameterError("epochs must be >= 1");
    if (cfg.batch_size < 1)
        throw ParameterError("batch_size must be >= 1");
    if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate))
        throw ParameterError("learning_rate must be a finite non-negative number");
    if (!(cfg.margin > 0.0))
        throw ParameterError("margin must be > 0");
    if (cfg.l2_reg && !(*cfg.l2_reg >= 0.0))
        throw ParameterError("l2_reg must be >= 0");
    if (cfg.negatives_per_positive < 1)
        throw ParameterError("negatives_per_positive must be >= 1");
    if (model.entity_count() != kg.entity_count() || model.relation_count() != kg.relation_count())
        throw ValidationError("model shape (" + std::to_string(model.entity_count()) + " entities, " +
                              std::to_string(model.relation_count()) + " relations) does not match graph (" +
                              std::to_string(kg.entity_count()) + ", " + std::to_string(kg.relation_count()) +
                              ")");
    if (kg.entity_count() < 2)
        throw ValidationError("training needs at least two entities");

    TrainHistory history;
    const Algorithm algo = model.algorithm();
    if (algo == Algorithm::RESCAL) {
        const std::size_t rel_params = model.relation_count() * model.relation_width();
        if (rel_params > cfg.rescal_parameter_budget)
            history.warnings.push_back("RESCAL relation parameters (" + std::to_string(rel_params) +
                                       ") exceed the budget of " + std::to_string(cfg.rescal_parameter_budget) +
                                       "; training may be slow or run out of memory");
    }

    const StepContext ctx{model, cfg.learning_rate, cfg.resolved_l2(algo), cfg.resolved_normalize(algo)};
    if (ctx.normalize)
        for (EntityId e = 0; e < model.entity_count(); ++e)
            project_unit_ball(model.entity(e));

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(kg.triple_count());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, order.size()));

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), rng);

        ShardTotals totals;
        if (threads == 1) {
            totals = run_shard(ctx, kg, cfg, order, 0, order.size(), rng, epoch);
        } else {
            std::vector<ShardTotals> parts(threads);
            std::vector<std::exception_ptr> errors(threads);
            std::vector<Rng> rngs;
            for (std::size_t t = 0; t < threads; ++t)
                rngs.emplace_back(rng());
            std::vector<std::thread> workers;
            const std::size_t chunk = (order.size() + threads - 1) / threads;
            for (std::size_t t = 0; t < threads; ++t) {
                const std::size_t b = std::min(order.size(), t * chunk);
                const std::size_t e = std::min(order.size(), b + chunk);
                workers.emplace_back([&, t, b, e] {
                    try {
                        parts[t] = run_shard(ctx, kg, cfg, order, b, e, rngs[t], epoch);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            }
            for (auto& w : workers)
                w.join();
            for (auto& err : errors)
                if (err)
                    std::rethrow_exception(err);
            for (const auto& p : parts) {
                totals.loss += p.loss;
                totals.pairs += p.pairs;
                totals.violations += p.violations;
            }
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.mean_loss = totals.pairs ? totals.loss / static_cast<double>(totals.pairs) : 0.0;
        rec.violation_rate =
            totals.pairs ? static_cast<double>(totals.violations) / static_cast<double>(totals.pairs) : 0.0;
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        history.epochs.push_back(rec);
        if (on_epoch)
            on_epoch(rec);
    }
    return history;
}

}  // namespace skge
