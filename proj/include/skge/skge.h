/*
 * C interface to the scene knowledge-graph embedding library.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an skge_status; on
 * failure a human-readable message is available from skge_last_error() on the
 * same thread until the next failing call. Strings returned through char**
 * out-parameters are heap-allocated and released with skge_string_free().
 */
#ifndef SKGE_SKGE_H
#define SKGE_SKGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SKGE_BUILDING_LIBRARY)
#    define SKGE_API __declspec(dllexport)
#  else
#    define SKGE_API __declspec(dllimport)
#  endif
#else
#  define SKGE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum skge_status {
    SKGE_OK = 0,
    SKGE_ERR_INVALID_ARGUMENT = 1, /* out-of-range parameter or null pointer */
    SKGE_ERR_PARSE = 2,            /* malformed TSV / vocabulary text */
    SKGE_ERR_VALIDATION = 3,       /* data violates a schema or invariant */
    SKGE_ERR_FORMAT = 4,           /* undecodable model file */
    SKGE_ERR_IO = 5,
    SKGE_ERR_NUMERIC = 6,          /* NaN/Inf during training */
    SKGE_ERR_UNSUPPORTED = 7,      /* operation undefined for this model */
    SKGE_ERR_INTERNAL = 8
} skge_status;

typedef enum skge_algorithm { SKGE_ALGO_TRANSE = 0, SKGE_ALGO_RESCAL = 1, SKGE_ALGO_HOLE = 2 } skge_algorithm;
typedef enum skge_norm { SKGE_NORM_L2 = 0, SKGE_NORM_L1 = 1 } skge_norm;
typedef enum skge_projection { SKGE_PROJECT_TSNE = 0, SKGE_PROJECT_PCA = 1 } skge_projection;

typedef struct skge_kg skge_kg;
typedef struct skge_model skge_model;

SKGE_API const char* skge_version(void);
SKGE_API const char* skge_last_error(void);
SKGE_API const char* skge_status_name(skge_status status);
SKGE_API void skge_string_free(char* s);

/* ---- knowledge graphs ------------------------------------------------ */

/* type_relation may be NULL for the default label "type". */
SKGE_API skge_status skge_kg_parse(const char* text, size_t length, const char* type_relation, skge_kg** out);
SKGE_API skge_status skge_kg_load(const char* path, const char* type_relation, skge_kg** out);
/* Builds the scene graph from scene-annotation JSON and ontology JSON text. */
SKGE_API skge_status skge_kg_from_scenes(const char* scenes_json, const char* ontology_json, skge_kg** out);
SKGE_API skge_status skge_kg_to_tsv(const skge_kg* kg, char** out);
/* Either output pointer may be NULL. */
SKGE_API skge_status skge_kg_stats(const skge_kg* kg, char** json, char** text);
SKGE_API size_t skge_kg_triple_count(const skge_kg* kg);
SKGE_API size_t skge_kg_entity_count(const skge_kg* kg);
SKGE_API size_t skge_kg_relation_count(const skge_kg* kg);
SKGE_API void skge_kg_free(skge_kg* kg);

/* ---- models ---------------------------------------------------------- */

typedef struct skge_model_config {
    skge_algorithm algorithm;
    uint32_t dimension;
    skge_norm transe_norm;
    uint64_t seed;
} skge_model_config;

typedef struct skge_train_config {
    uint32_t epochs;
    uint32_t batch_size;
    double learning_rate;
    double margin;
    uint32_t negatives_per_positive;
    int normalize_entities; /* -1: algorithm default, 0: off, 1: on */
    double l2_reg;          /* negative: algorithm default */
    uint64_t seed;
    uint32_t threads;
    uint64_t rescal_parameter_budget;
} skge_train_config;

typedef void (*skge_epoch_callback)(void* user, uint32_t epoch, double mean_loss, double violation_rate,
                                    double seconds);

SKGE_API void skge_model_config_init(skge_model_config* cfg);
SKGE_API void skge_train_config_init(skge_train_config* cfg);

SKGE_API skge_status skge_model_init(const skge_kg* kg, const skge_model_config* cfg, skge_model** out);
/* history_json (per-epoch records and warnings) may be NULL. */
SKGE_API skge_status skge_model_train(skge_model* model, const skge_kg* kg, const skge_train_config* cfg,
                                      skge_epoch_callback on_epoch, void* user, char** history_json);
/* Writes the model file plus "<path>.entities.txt" and "<path>.relations.txt". */
SKGE_API skge_status skge_model_save(const skge_model* model, const char* path);
SKGE_API skge_status skge_model_load(const char* path, skge_model** out);
/* JSON {"algorithm","d","n","m","transe_norm","seed","parameters"}. */
SKGE_API skge_status skge_model_info(const skge_model* model, char** json);
SKGE_API void skge_model_free(skge_model* model);

/* ---- evaluation and queries ------------------------------------------ */

/* k = 0 selects the default neighborhood size. timestamp may be NULL. */
SKGE_API skge_status skge_eval(const skge_model* model, const skge_kg* kg, uint32_t k, const char* timestamp,
                               char** json, char** text);
SKGE_API skge_status skge_similar_scenes(const skge_model* model, const char* const* scene_ids, size_t count,
                                         uint32_t top_k, char** json, char** text);
SKGE_API skge_status skge_neighbors(const skge_model* model, const char* entity, uint32_t k, char** json,
                                    char** text);

typedef struct skge_project_config {
    skge_projection method;
    double perplexity;
    uint32_t iterations;
    double learning_rate;
    double early_exaggeration;
    uint32_t exaggeration_iterations;
    uint64_t seed;
} skge_project_config;

SKGE_API void skge_project_config_init(skge_project_config* cfg);
/* entities may be NULL (count 0) for all entities; kg may be NULL (no class
 * column). csv and svg may each be NULL. */
SKGE_API skge_status skge_project(const skge_model* model, const skge_kg* kg, const char* const* entities,
                                  size_t count, const skge_project_config* cfg, char** csv, char** svg);

#ifdef __cplusplus
}
#endif

#endif /* SKGE_SKGE_H */
