#include "skge/similarity.hpp"

#include <algorithm>
#include <cmath>

namespace skge {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
}

bool ranks_before(const Neighbor& a, const Neighbor& b) {
    if (a.cosine != b.cosine)
        return a.cosine > b.cosine;
    return a.id < b.id;
}

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = std::sqrt(dot(a, a));
    const double nb = std::sqrt(dot(b, b));
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    return dot(a, b) / (na * nb);
}

CosineIndex::CosineIndex(const EmbeddingModel& model) : model_(model), norms_(model.entity_count()) {
    for (EntityId e = 0; e < model.entity_count(); ++e) {
        auto v = model.entity(e);
        norms_[e] = std::sqrt(dot(v, v));
    }
}

double CosineIndex::similarity(EntityId a, EntityId b) const {
    if (norms_[a] == 0.0 || norms_[b] == 0.0)
        return 0.0;
    return dot(model_.entity(a), model_.entity(b)) / (norms_[a] * norms_[b]);
}

std::vector<Neighbor> CosineIndex::nearest(EntityId query, std::size_t k, const std::vector<bool>* exclude) const {
    std::vector<Neighbor> pool;
    pool.reserve(norms_.size());
    for (EntityId e = 0; e < norms_.size(); ++e) {
        if (e == query || (exclude && (*exclude)[e]))
            continue;
        pool.push_back({e, similarity(query, e)});
    }
    const std::size_t take = std::min(k, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(), ranks_before);
    pool.resize(take);
    return pool;
}

}  // namespace skge
