#include "skge/analytics.hpp"

#include "skge/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace skge {

std::vector<Neighbor> nearest_neighbors(const EmbeddingModel& model, EntityId entity, std::size_t k) {
    const std::size_t n = model.entity_count();
    if (entity >= n)
        throw ParameterError("entity id " + std::to_string(entity) + " out of range");
    if (k < 1 || k >= n)
        throw ParameterError("k must satisfy 1 <= k < " + std::to_string(n) + " (got " + std::to_string(k) + ")");
    return CosineIndex(model).nearest(entity, k);
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingModel& model, const Vocab& entities,
                                        std::string_view entity, std::size_t k) {
    auto id = entities.find(entity);
    if (!id)
        throw ValidationError("unknown entity '" + std::string(entity) + "'");
    return nearest_neighbors(model, *id, k);
}

SimilarityResult most_similar_scene_pairs(const EmbeddingModel& model, const Vocab& entities,
                                          const std::vector<std::string>& scene_ids, std::size_t top_k) {
    std::vector<EntityId> ids;
    for (const auto& s : scene_ids) {
        auto id = entities.find(s);
        if (!id)
            throw ValidationError("unknown scene id '" + s + "'");
        ids.push_back(*id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() < 2)
        throw ParameterError("need at least two distinct scenes");

    struct Scored {
        EntityId a, b;
        double score;
    };
    const CosineIndex index(model);
    std::vector<Scored> all;
    all.reserve(ids.size() * (ids.size() - 1) / 2);
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
            all.push_back({ids[i], ids[j], index.similarity(ids[i], ids[j])});
    std::stable_sort(all.begin(), all.end(), [](const Scored& x, const Scored& y) { return x.score > y.score; });

    SimilarityResult r;
    const std::size_t take = std::min(top_k, all.size());
    for (std::size_t i = 0; i < take; ++i)
        r.pairs.push_back({entities.label(all[i].a), entities.label(all[i].b), all[i].score});
    return r;
}

std::string similarity_to_json(const SimilarityResult& r) {
    nlohmann::ordered_json j;
    j["pairs"] = nlohmann::ordered_json::array();
    for (const auto& p : r.pairs)
        j["pairs"].push_back({{"a", p.a}, {"b", p.b}, {"score", p.score}});
    return j.dump(2) + "\n";
}

namespace {

std::string table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (widths.size() <= i)
                widths.push_back(0);
            widths[i] = std::max(widths[i], r[i].size());
        }
    std::ostringstream os;
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            const bool last = i + 1 == r.size();
            os << std::left << std::setw(last ? 0 : static_cast<int>(widths[i]) + 2) << r[i];
        }
        os << '\n';
    }
    return os.str();
}

std::string fixed(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << v;
    return os.str();
}

}  // namespace

std::string similarity_to_text(const SimilarityResult& r) {
    std::vector<std::vector<std::string>> rows{{"rank", "scene_a", "scene_b", "cosine"}};
    for (std::size_t i = 0; i < r.pairs.size(); ++i)
        rows.push_back({std::to_string(i + 1), r.pairs[i].a, r.pairs[i].b, fixed(r.pairs[i].score)});
    return table(rows);
}

std::string neighbors_to_json(const Vocab& entities, std::string_view query, const std::vector<Neighbor>& nn) {
    nlohmann::ordered_json j;
    j["entity"] = std::string(query);
    j["neighbors"] = nlohmann::ordered_json::array();
    for (const auto& n : nn)
        j["neighbors"].push_back({{"entity", entities.label(n.id)}, {"cosine", n.cosine}});
    return j.dump(2) + "\n";
}

std::string neighbors_to_text(const Vocab& entities, std::string_view query, const std::vector<Neighbor>& nn) {
    std::vector<std::vector<std::string>> rows{{"rank", "entity", "cosine"}};
    for (std::size_t i = 0; i < nn.size(); ++i)
        rows.push_back({std::to_string(i + 1), entities.label(nn[i].id), fixed(nn[i].cosine)});
    return "neighbors of " + std::string(query) + "\n" + table(rows);
}

}  // namespace skge
