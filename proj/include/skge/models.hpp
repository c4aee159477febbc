#pragma once

#include "skge/kg.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skge {

enum class Algorithm { TransE, RESCAL, HolE };
enum class Norm { L1, L2 };

std::string_view to_string(Algorithm a) noexcept;
std::string_view to_string(Norm n) noexcept;
/// Case-insensitive ("transe", "TransE", ...). Throws ParameterError.
Algorithm parse_algorithm(std::string_view s);
Norm parse_norm(std::string_view s);

struct ModelConfig {
    Algorithm algorithm = Algorithm::TransE;
    std::size_t dimension = 100;
    Norm transe_norm = Norm::L2;
    std::uint64_t seed = 0;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Entity vectors (n x d) plus relation parameters: one d-vector per relation
/// for TransE/HolE, one row-major d x d matrix per relation for RESCAL.
/// Values live in double precision; the on-disk format narrows to float32.
class EmbeddingModel {
public:
    EmbeddingModel() = default;
    /// Zero-initialized parameters. Throws ParameterError when dimension is 0.
    EmbeddingModel(const ModelConfig& config, std::size_t entities, std::size_t relations);

    const ModelConfig& config() const noexcept { return config_; }
    Algorithm algorithm() const noexcept { return config_.algorithm; }
    std::size_t dim() const noexcept { return config_.dimension; }
    std::size_t entity_count() const noexcept { return entities_; }
    std::size_t relation_count() const noexcept { return relations_; }

    /// d for vector relations, d*d for RESCAL.
    std::size_t relation_width() const noexcept { return relation_width_; }
    bool has_vector_relations() const noexcept { return config_.algorithm != Algorithm::RESCAL; }

    std::span<double> entity(EntityId e) { return {entity_data_.data() + e * dim(), dim()}; }
    std::span<const double> entity(EntityId e) const { return {entity_data_.data() + e * dim(), dim()}; }
    std::span<double> relation(RelationId r) {
        return {relation_data_.data() + r * relation_width_, relation_width_};
    }
    std::span<const double> relation(RelationId r) const {
        return {relation_data_.data() + r * relation_width_, relation_width_};
    }

    std::vector<double>& entity_data() noexcept { return entity_data_; }
    const std::vector<double>& entity_data() const noexcept { return entity_data_; }
    std::vector<double>& relation_data() noexcept { return relation_data_; }
    const std::vector<double>& relation_data() const noexcept { return relation_data_; }

    std::size_t parameter_count() const noexcept { return entity_data_.size() + relation_data_.size(); }
    bool all_finite() const noexcept;

    /// Throws ParameterError if any id is out of range.
    void check(const Triple& t) const;

    friend bool operator==(const EmbeddingModel&, const EmbeddingModel&) = default;

private:
    ModelConfig config_;
    std::size_t entities_ = 0;
    std::size_t relations_ = 0;
    std::size_t relation_width_ = 0;
    std::vector<double> entity_data_;
    std::vector<double> relation_data_;
};

/// [a*b]_k = sum_i a_i b_{(k+i) mod d}. Uses the FFT path for larger d.
std::vector<double> circular_correlation(std::span<const double> a, std::span<const double> b);
/// Always goes through the discrete Fourier transform: conj(F(a)) . F(b).
std::vector<double> circular_correlation_fft(std::span<const double> a, std::span<const double> b);
/// [a (x) b]_k = sum_i a_i b_{(k-i) mod d}.
std::vector<double> circular_convolution(std::span<const double> a, std::span<const double> b);

/// Plausibility of a triple; higher is better for every algorithm.
///   TransE: -||h + r - t||   (L1 or L2)
///   RESCAL: h^T W_r t
///   HolE:   r . (h * t)
double score(const EmbeddingModel& model, const Triple& triple);

struct GradientRow {
    std::uint32_t id = 0;
    std::vector<double> values;
};

/// Gradient restricted to the rows a pair of triples touches.
struct SparseGradient {
    std::vector<GradientRow> entities;
    std::vector<GradientRow> relations;

    /// Returns the row for `id`, inserting a zero row of `width` if absent.
    std::span<double> entity_row(std::uint32_t id, std::size_t width);
    std::span<double> relation_row(std::uint32_t id, std::size_t width);
    bool empty() const noexcept { return entities.empty() && relations.empty(); }
};

/// Adds coeff * d score(triple) / d params into `grad`.
void accumulate_score_gradient(const EmbeddingModel& model, const Triple& triple, double coeff,
                               SparseGradient& grad);

struct LossAndGradient {
    double loss = 0.0;
    SparseGradient gradient;
};

/// Margin ranking loss max(0, margin - score(pos) + score(neg)) and its
/// gradient. The gradient is empty when the hinge is inactive.
/// Throws ParameterError when margin <= 0 or when `negative` is not a head or
/// tail corruption of `positive`.
LossAndGradient loss_and_grad(const EmbeddingModel& model, const Triple& positive, const Triple& negative,
                              double margin);

}  // namespace skge
