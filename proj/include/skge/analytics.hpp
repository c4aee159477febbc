#pragma once

#include "skge/kg.hpp"
#include "skge/models.hpp"
#include "skge/similarity.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace skge {

/// Top-k entities by cosine to `entity`, self excluded, ties by ascending id.
/// Throws ParameterError unless 1 <= k < entity count.
std::vector<Neighbor> nearest_neighbors(const EmbeddingModel& model, EntityId entity, std::size_t k);
/// Label-based variant; throws ValidationError for unknown labels.
std::vector<Neighbor> nearest_neighbors(const EmbeddingModel& model, const Vocab& entities,
                                        std::string_view entity, std::size_t k);

struct ScenePair {
    std::string a;
    std::string b;
    double score = 0.0;

    friend bool operator==(const ScenePair&, const ScenePair&) = default;
};

/// Ranked, non-increasing scores; each unordered pair appears once with
/// `a` the lower entity id.
struct SimilarityResult {
    std::vector<ScenePair> pairs;
};

/// Scores every unordered pair of the given scene entities by the cosine of
/// their own vectors and returns the best `top_k`. Duplicate ids are
/// collapsed. Throws ValidationError for unknown ids and ParameterError for
/// fewer than two distinct scenes.
SimilarityResult most_similar_scene_pairs(const EmbeddingModel& model, const Vocab& entities,
                                          const std::vector<std::string>& scene_ids, std::size_t top_k);

std::string similarity_to_json(const SimilarityResult& r);
std::string similarity_to_text(const SimilarityResult& r);
std::string neighbors_to_json(const Vocab& entities, std::string_view query, const std::vector<Neighbor>& nn);
std::string neighbors_to_text(const Vocab& entities, std::string_view query, const std::vector<Neighbor>& nn);

/// Dense row-major matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
};

using Point2 = std::array<double, 2>;

struct TsneParams {
    double perplexity = 30.0;
    std::size_t iterations = 1000;
    double learning_rate = 200.0;
    double early_exaggeration = 12.0;
    std::size_t exaggeration_iterations = 250;
    std::uint64_t seed = 0;
};

/// Exact O(N^2) t-SNE: Gaussian input affinities with per-point bandwidth
/// bisected to the target perplexity, symmetrized; Student-t output
/// affinities; gradient descent with momentum, gains and early exaggeration.
/// If `kl_trace` is given it receives KL(P||Q) after every iteration
/// (unexaggerated P).
/// Throws ParameterError when rows < 3 or perplexity is not in (0, (rows-1)/3).
std::vector<Point2> tsne(const Matrix& data, const TsneParams& params, std::vector<double>* kl_trace = nullptr);

/// Projection onto the top two principal components of the mean-centered
/// rows. Each axis is signed so its largest-magnitude loading is positive.
/// Throws ParameterError when rows < 2.
std::vector<Point2> pca_2d(const Matrix& data);

enum class ProjectionMethod { TSNE, PCA };
std::string_view to_string(ProjectionMethod m) noexcept;
ProjectionMethod parse_projection_method(std::string_view s);

struct ProjectedPoint {
    std::string label;
    double x = 0.0;
    double y = 0.0;
    std::string class_label;
};

struct Projection2D {
    ProjectionMethod method = ProjectionMethod::TSNE;
    TsneParams params;
    std::vector<ProjectedPoint> points;
};

/// Projects the given entities (all entities when empty). If `kg` is non-null
/// each point carries the label of its lowest-id class.
Projection2D project_2d(const EmbeddingModel& model, const Vocab& entities, const std::vector<std::string>& which,
                        ProjectionMethod method, const TsneParams& params, const KnowledgeGraph* kg = nullptr);

/// "label,x,y,class" with a header row; fields quoted per RFC 4180 when needed.
std::string projection_to_csv(const Projection2D& p);
/// Self-contained SVG scatter plot, one color per class.
std::string projection_to_svg(const Projection2D& p);

}  // namespace skge
