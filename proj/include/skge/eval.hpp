#pragma once

#include "skge/kg.hpp"
#include "skge/models.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skge {

inline constexpr std::size_t kDefaultCoherenceK = 10;

/// Per-key metric values plus any degeneracy warnings raised while computing
/// them.
struct MetricScores {
    std::map<std::string, double> values;
    std::vector<std::string> warnings;

    /// Unweighted mean over keys; nullopt when empty.
    std::optional<double> macro() const;

    friend bool operator==(const MetricScores&, const MetricScores&) = default;
};

/// For every class with instances: cosine(mean of instance vectors, class
/// vector). Zero vectors score 0 and add a warning.
/// Throws ValidationError when the graph has no type relation or the model
/// shape does not match the graph.
MetricScores categorization(const EmbeddingModel& model, const KnowledgeGraph& kg);

/// For every class with instances: mean over its instances of the fraction of
/// the instance's k cosine-nearest neighbors that share the class. Class
/// entities are never neighbors; ties go to the lower id. An instance with no
/// candidate neighbors contributes 0.
/// Throws ParameterError unless 1 <= k < entity count.
MetricScores coherence(const EmbeddingModel& model, const KnowledgeGraph& kg, std::size_t k);

/// For every relation with triples: mean over (h, r, t) of cosine(h + r, t).
/// Throws UnsupportedError for models with matrix relations (RESCAL).
MetricScores transitional_distance(const EmbeddingModel& model, const KnowledgeGraph& kg);

struct EvalReport {
    std::string algorithm;
    std::size_t dimension = 0;
    std::size_t k = 0;
    std::string timestamp;

    MetricScores categorization;
    MetricScores coherence;
    bool transitional_supported = true;
    std::string transitional_reason;
    MetricScores transitional;

    std::vector<std::string> warnings() const;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Runs all three metrics. For RESCAL the transitional section is left empty
/// and marked unsupported. `timestamp` is recorded verbatim.
EvalReport eval_report(const EmbeddingModel& model, const KnowledgeGraph& kg, std::size_t k,
                       std::string timestamp = {});

std::string report_to_json(const EvalReport& report);
/// Throws ValidationError on schema mismatch.
EvalReport report_from_json(std::string_view json_text);
/// Fixed-width per-class table (categorization, coherence) followed by the
/// per-relation transitional table.
std::string report_to_text(const EvalReport& report);

}  // namespace skge
