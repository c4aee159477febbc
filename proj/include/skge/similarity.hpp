#pragma once

#include "skge/kg.hpp"
#include "skge/models.hpp"

#include <span>
#include <vector>

namespace skge {

/// Cosine similarity; 0 when either vector is zero.
double cosine(std::span<const double> a, std::span<const double> b);

struct Neighbor {
    EntityId id = 0;
    double cosine = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Exhaustive cosine search over entity vectors with cached norms.
/// Results are ordered by descending cosine, ties by ascending id.
class CosineIndex {
public:
    explicit CosineIndex(const EmbeddingModel& model);

    double similarity(EntityId a, EntityId b) const;
    bool is_zero(EntityId e) const { return norms_[e] == 0.0; }

    /// Top-k neighbors of `query`, excluding the query itself and every id
    /// whose `exclude` flag is set (if given). May return fewer than k when
    /// the candidate pool is smaller.
    std::vector<Neighbor> nearest(EntityId query, std::size_t k, const std::vector<bool>* exclude = nullptr) const;

private:
    const EmbeddingModel& model_;
    std::vector<double> norms_;
};

}  // namespace skge
