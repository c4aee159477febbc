#define SKGE_BUILDING_LIBRARY
#include "skge/skge.h"

#include "skge/analytics.hpp"
#include "skge/error.hpp"
#include "skge/eval.hpp"
#include "skge/kg.hpp"
#include "skge/model_io.hpp"
#include "skge/models.hpp"
#include "skge/scene.hpp"
#include "skge/train.hpp"

#include "json.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

struct skge_kg {
    skge::KnowledgeGraph kg;
};

struct skge_model {
    skge::EmbeddingModel model;
    skge::Vocab entities;
    skge::Vocab relations;
};

namespace {

thread_local std::string g_last_error;

skge_status fail(skge_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

template <class F>
skge_status guarded(F&& body) {
    try {
        body();
        return SKGE_OK;
    } catch (const skge::ParseError& e) {
        return fail(SKGE_ERR_PARSE, e.what());
    } catch (const skge::ValidationError& e) {
        return fail(SKGE_ERR_VALIDATION, e.what());
    } catch (const skge::ParameterError& e) {
        return fail(SKGE_ERR_INVALID_ARGUMENT, e.what());
    } catch (const skge::UnsupportedError& e) {
        return fail(SKGE_ERR_UNSUPPORTED, e.what());
    } catch (const skge::NumericError& e) {
        return fail(SKGE_ERR_NUMERIC, e.what());
    } catch (const skge::IoError& e) {
        return fail(SKGE_ERR_IO, e.what());
    } catch (const skge::ModelFormatError& e) {
        return fail(SKGE_ERR_FORMAT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SKGE_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SKGE_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SKGE_ERR_INTERNAL, "unknown error");
    }
}

char* dup(const std::string& s) {
    auto* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p)
        throw std::bad_alloc();
    std::memcpy(p, s.data(), s.size());
    p[s.size()] = '\0';
    return p;
}

void emit(char** out, const std::string& s) {
    if (out)
        *out = dup(s);
}

// All-or-nothing: on failure neither output is set.
void emit_both(char** a, const std::string& sa, char** b, const std::string& sb) {
    char* pa = a ? dup(sa) : nullptr;
    try {
        emit(b, sb);
    } catch (...) {
        std::free(pa);
        throw;
    }
    if (a)
        *a = pa;
}

void require(const void* p, const char* what) {
    if (!p)
        throw skge::ParameterError(std::string(what) + " must not be null");
}

std::string_view type_label(const char* s) { return s ? std::string_view(s) : skge::kDefaultTypeRelation; }

void require_same_vocab(const skge_model& m, const skge::KnowledgeGraph& kg) {
    if (!(m.entities == kg.entities()) || !(m.relations == kg.relations()))
        throw skge::ValidationError("model vocabulary does not match the knowledge graph "
                                    "(was the model trained on this graph?)");
}

std::vector<std::string> strings(const char* const* items, std::size_t count) {
    std::vector<std::string> out;
    if (count)
        require(items, "string list");
    for (std::size_t i = 0; i < count; ++i) {
        require(items[i], "string list entry");
        out.emplace_back(items[i]);
    }
    return out;
}

}  // namespace

extern "C" {

const char* skge_version(void) { return "0.1.0"; }

const char* skge_last_error(void) { return g_last_error.c_str(); }

const char* skge_status_name(skge_status status) {
    switch (status) {
    case SKGE_OK: return "ok";
    case SKGE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SKGE_ERR_PARSE: return "parse error";
    case SKGE_ERR_VALIDATION: return "validation error";
    case SKGE_ERR_FORMAT: return "format error";
    case SKGE_ERR_IO: return "i/o error";
    case SKGE_ERR_NUMERIC: return "numeric error";
    case SKGE_ERR_UNSUPPORTED: return "unsupported";
    case SKGE_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void skge_string_free(char* s) { std::free(s); }

skge_status skge_kg_parse(const char* text, size_t length, const char* type_relation, skge_kg** out) {
    return guarded([&] {
        require(out, "out");
        require(text, "text");
        auto kg = skge::parse_triples(std::string_view(text, length), type_label(type_relation));
        *out = new skge_kg{std::move(kg)};
    });
}

skge_status skge_kg_load(const char* path, const char* type_relation, skge_kg** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        auto kg = skge::parse_triples(skge::read_file(path), type_label(type_relation));
        *out = new skge_kg{std::move(kg)};
    });
}

skge_status skge_kg_from_scenes(const char* scenes_json, const char* ontology_json, skge_kg** out) {
    return guarded([&] {
        require(scenes_json, "scenes_json");
        require(ontology_json, "ontology_json");
        require(out, "out");
        auto ds = skge::load_scene_dataset(scenes_json);
        auto cfg = skge::load_ontology_config(ontology_json);
        *out = new skge_kg{skge::emit_triples(ds, cfg)};
    });
}

skge_status skge_kg_to_tsv(const skge_kg* kg, char** out) {
    return guarded([&] {
        require(kg, "kg");
        require(out, "out");
        *out = dup(skge::write_triples(kg->kg));
    });
}

skge_status skge_kg_stats(const skge_kg* kg, char** json, char** text) {
    return guarded([&] {
        require(kg, "kg");
        auto s = skge::stats(kg->kg);
        std::string j = skge::stats_to_json(s);
        std::string t = skge::stats_to_text(s);
        emit_both(json, j, text, t);
    });
}

size_t skge_kg_triple_count(const skge_kg* kg) { return kg ? kg->kg.triple_count() : 0; }
size_t skge_kg_entity_count(const skge_kg* kg) { return kg ? kg->kg.entity_count() : 0; }
size_t skge_kg_relation_count(const skge_kg* kg) { return kg ? kg->kg.relation_count() : 0; }

void skge_kg_free(skge_kg* kg) { delete kg; }

void skge_model_config_init(skge_model_config* cfg) {
    if (!cfg)
        return;
    cfg->algorithm = SKGE_ALGO_TRANSE;
    cfg->dimension = 100;
    cfg->transe_norm = SKGE_NORM_L2;
    cfg->seed = 0;
}

void skge_train_config_init(skge_train_config* cfg) {
    if (!cfg)
        return;
    const skge::TrainConfig d;
    cfg->epochs = static_cast<uint32_t>(d.epochs);
    cfg->batch_size = static_cast<uint32_t>(d.batch_size);
    cfg->learning_rate = d.learning_rate;
    cfg->margin = d.margin;
    cfg->negatives_per_positive = static_cast<uint32_t>(d.negatives_per_positive);
    cfg->normalize_entities = -1;
    cfg->l2_reg = -1.0;
    cfg->seed = d.seed;
    cfg->threads = static_cast<uint32_t>(d.threads);
    cfg->rescal_parameter_budget = d.rescal_parameter_budget;
}

skge_status skge_model_init(const skge_kg* kg, const skge_model_config* cfg, skge_model** out) {
    return guarded([&] {
        require(kg, "kg");
        require(cfg, "cfg");
        require(out, "out");
        skge::ModelConfig mc;
        switch (cfg->algorithm) {
        case SKGE_ALGO_TRANSE: mc.algorithm = skge::Algorithm::TransE; break;
        case SKGE_ALGO_RESCAL: mc.algorithm = skge::Algorithm::RESCAL; break;
        case SKGE_ALGO_HOLE: mc.algorithm = skge::Algorithm::HolE; break;
        default: throw skge::ParameterError("unknown algorithm");
        }
        switch (cfg->transe_norm) {
        case SKGE_NORM_L2: mc.transe_norm = skge::Norm::L2; break;
        case SKGE_NORM_L1: mc.transe_norm = skge::Norm::L1; break;
        default: throw skge::ParameterError("unknown norm");
        }
        mc.dimension = cfg->dimension;
        mc.seed = cfg->seed;
        auto model = skge::init_model(mc, kg->kg);
        *out = new skge_model{std::move(model), kg->kg.entities(), kg->kg.relations()};
    });
}

skge_status skge_model_train(skge_model* model, const skge_kg* kg, const skge_train_config* cfg,
                             skge_epoch_callback on_epoch, void* user, char** history_json) {
    return guarded([&] {
        require(model, "model");
        require(kg, "kg");
        require(cfg, "cfg");
        require_same_vocab(*model, kg->kg);
        skge::TrainConfig tc;
        tc.epochs = cfg->epochs;
        tc.batch_size = cfg->batch_size;
        tc.learning_rate = cfg->learning_rate;
        tc.margin = cfg->margin;
        tc.negatives_per_positive = cfg->negatives_per_positive;
        if (cfg->normalize_entities >= 0)
            tc.normalize_entities = cfg->normalize_entities != 0;
        if (cfg->l2_reg >= 0.0)
            tc.l2_reg = cfg->l2_reg;
        tc.seed = cfg->seed;
        tc.threads = cfg->threads;
        tc.rescal_parameter_budget = cfg->rescal_parameter_budget;

        skge::EpochCallback cb;
        if (on_epoch)
            cb = [&](const skge::EpochRecord& r) {
                on_epoch(user, static_cast<uint32_t>(r.epoch), r.mean_loss, r.violation_rate, r.seconds);
            };
        // Train a copy so a failed run leaves the handle untouched.
        skge::EmbeddingModel work = model->model;
        auto history = skge::train(work, kg->kg, tc, cb);
        emit(history_json, skge::history_to_json(history));
        model->model = std::move(work);
    });
}

skge_status skge_model_save(const skge_model* model, const char* path) {
    return guarded([&] {
        require(model, "model");
        require(path, "path");
        const std::string p(path);
        skge::write_file_atomic(skge::entities_sidecar(p), skge::encode_vocab(model->entities));
        skge::write_file_atomic(skge::relations_sidecar(p), skge::encode_vocab(model->relations));
        skge::save_model(model->model, p);
    });
}

skge_status skge_model_load(const char* path, skge_model** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        const std::string p(path);
        auto model = skge::load_model(p);
        auto entities = skge::decode_vocab(skge::read_file(skge::entities_sidecar(p)));
        auto relations = skge::decode_vocab(skge::read_file(skge::relations_sidecar(p)));
        if (entities.size() != model.entity_count() || relations.size() != model.relation_count())
            throw skge::ValidationError("vocabulary sidecars do not match model '" + p + "' (" +
                                        std::to_string(entities.size()) + "/" + std::to_string(relations.size()) +
                                        " labels for " + std::to_string(model.entity_count()) + "/" +
                                        std::to_string(model.relation_count()) + " rows)");
        *out = new skge_model{std::move(model), std::move(entities), std::move(relations)};
    });
}

skge_status skge_model_info(const skge_model* model, char** json) {
    return guarded([&] {
        require(model, "model");
        require(json, "json");
        const auto& m = model->model;
        nlohmann::ordered_json j;
        j["algorithm"] = std::string(skge::to_string(m.algorithm()));
        j["d"] = m.dim();
        j["n"] = m.entity_count();
        j["m"] = m.relation_count();
        j["transe_norm"] = std::string(skge::to_string(m.config().transe_norm));
        j["seed"] = m.config().seed;
        j["parameters"] = m.parameter_count();
        *json = dup(j.dump(2) + "\n");
    });
}

void skge_model_free(skge_model* model) { delete model; }

skge_status skge_eval(const skge_model* model, const skge_kg* kg, uint32_t k, const char* timestamp, char** json,
                      char** text) {
    return guarded([&] {
        require(model, "model");
        require(kg, "kg");
        require_same_vocab(*model, kg->kg);
        auto report = skge::eval_report(model->model, kg->kg, k ? k : skge::kDefaultCoherenceK,
                                        timestamp ? timestamp : "");
        const std::string j = skge::report_to_json(report);
        const std::string t = skge::report_to_text(report);
        emit_both(json, j, text, t);
    });
}

skge_status skge_similar_scenes(const skge_model* model, const char* const* scene_ids, size_t count, uint32_t top_k,
                                char** json, char** text) {
    return guarded([&] {
        require(model, "model");
        auto r = skge::most_similar_scene_pairs(model->model, model->entities, strings(scene_ids, count), top_k);
        const std::string j = skge::similarity_to_json(r);
        const std::string t = skge::similarity_to_text(r);
        emit_both(json, j, text, t);
    });
}

skge_status skge_neighbors(const skge_model* model, const char* entity, uint32_t k, char** json, char** text) {
    return guarded([&] {
        require(model, "model");
        require(entity, "entity");
        auto nn = skge::nearest_neighbors(model->model, model->entities, entity, k);
        const std::string j = skge::neighbors_to_json(model->entities, entity, nn);
        const std::string t = skge::neighbors_to_text(model->entities, entity, nn);
        emit_both(json, j, text, t);
    });
}

void skge_project_config_init(skge_project_config* cfg) {
    if (!cfg)
        return;
    const skge::TsneParams d;
    cfg->method = SKGE_PROJECT_TSNE;
    cfg->perplexity = d.perplexity;
    cfg->iterations = static_cast<uint32_t>(d.iterations);
    cfg->learning_rate = d.learning_rate;
    cfg->early_exaggeration = d.early_exaggeration;
    cfg->exaggeration_iterations = static_cast<uint32_t>(d.exaggeration_iterations);
    cfg->seed = d.seed;
}

skge_status skge_project(const skge_model* model, const skge_kg* kg, const char* const* entities, size_t count,
                         const skge_project_config* cfg, char** csv, char** svg) {
    return guarded([&] {
        require(model, "model");
        require(cfg, "cfg");
        if (kg)
            require_same_vocab(*model, kg->kg);
        skge::TsneParams params;
        params.perplexity = cfg->perplexity;
        params.iterations = cfg->iterations;
        params.learning_rate = cfg->learning_rate;
        params.early_exaggeration = cfg->early_exaggeration;
        params.exaggeration_iterations = cfg->exaggeration_iterations;
        params.seed = cfg->seed;
        skge::ProjectionMethod method;
        switch (cfg->method) {
        case SKGE_PROJECT_TSNE: method = skge::ProjectionMethod::TSNE; break;
        case SKGE_PROJECT_PCA: method = skge::ProjectionMethod::PCA; break;
        default: throw skge::ParameterError("unknown projection method");
        }
        auto p = skge::project_2d(model->model, model->entities, strings(entities, count), method, params,
                                  kg ? &kg->kg : nullptr);
        const std::string c = skge::projection_to_csv(p);
        const std::string s = svg ? skge::projection_to_svg(p) : std::string();
        emit_both(csv, c, svg, s);
    });
}

}  // extern "C"
