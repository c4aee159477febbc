#include "skge/eval.hpp"

#include "skge/error.hpp"
#include "skge/similarity.hpp"

#include "json.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

namespace skge {

std::optional<double> MetricScores::macro() const {
    if (values.empty())
        return std::nullopt;
    double acc = 0.0;
    for (const auto& [key, v] : values)
        acc += v;
    return acc / static_cast<double>(values.size());
}

std::vector<std::string> EvalReport::warnings() const {
    std::vector<std::string> out;
    for (const auto* m : {&categorization, &coherence, &transitional})
        out.insert(out.end(), m->warnings.begin(), m->warnings.end());
    return out;
}

namespace {

void check_shape(const EmbeddingModel& model, const KnowledgeGraph& kg) {
    if (model.entity_count() != kg.entity_count() || model.relation_count() != kg.relation_count())
        throw ValidationError("model shape (" + std::to_string(model.entity_count()) + " entities, " +
                              std::to_string(model.relation_count()) + " relations) does not match graph (" +
                              std::to_string(kg.entity_count()) + ", " + std::to_string(kg.relation_count()) +
                              ")");
}

void require_types(const KnowledgeGraph& kg) {
    if (!kg.type_relation())
        throw ValidationError("graph has no type relation");
}

bool is_zero(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

MetricScores categorization(const EmbeddingModel& model, const KnowledgeGraph& kg) {
    check_shape(model, kg);
    require_types(kg);
    MetricScores out;
    const std::size_t d = model.dim();
    for (EntityId c : kg.classes_with_instances()) {
        const auto& instances = kg.instances_of(c);
        std::vector<double> mean(d, 0.0);
        for (EntityId e : instances) {
            auto v = model.entity(e);
            for (std::size_t i = 0; i < d; ++i)
                mean[i] += v[i];
        }
        for (auto& x : mean)
            x /= static_cast<double>(instances.size());
        const auto& label = kg.entities().label(c);
        auto cls = model.entity(c);
        if (is_zero(mean) || is_zero(cls))
            out.warnings.push_back("categorization: zero vector for class '" + label + "'");
        out.values[label] = std::clamp(cosine(mean, cls), -1.0, 1.0);
    }
    return out;
}

MetricScores coherence(const EmbeddingModel& model, const KnowledgeGraph& kg, std::size_t k) {
    check_shape(model, kg);
    require_types(kg);
    if (k < 1 || k >= kg.entity_count())
        throw ParameterError("coherence k must satisfy 1 <= k < " + std::to_string(kg.entity_count()) + " (got " +
                             std::to_string(k) + ")");
    MetricScores out;
    const CosineIndex index(model);
    const auto& exclude = kg.class_mask();
    std::set<EntityId> zero_warned;
    for (EntityId c : kg.classes_with_instances()) {
        const auto& instances = kg.instances_of(c);
        double acc = 0.0;
        for (EntityId e : instances) {
            if (index.is_zero(e) && zero_warned.insert(e).second)
                out.warnings.push_back("coherence: zero vector for entity '" + kg.entities().label(e) + "'");
            const auto nn = index.nearest(e, k, &exclude);
            if (nn.empty())
                continue;
            std::size_t same = 0;
            for (const auto& n : nn)
                same += kg.has_type(n.id, c) ? 1 : 0;
            acc += static_cast<double>(same) / static_cast<double>(nn.size());
        }
        out.values[kg.entities().label(c)] = acc / static_cast<double>(instances.size());
    }
    return out;
}

MetricScores transitional_distance(const EmbeddingModel& model, const KnowledgeGraph& kg) {
    check_shape(model, kg);
    if (!model.has_vector_relations())
        throw UnsupportedError("transitional distance is undefined for " + std::string(to_string(model.algorithm())) +
                               " (matrix relations)");
    MetricScores out;
    const std::size_t d = model.dim();
    std::vector<double> hr(d);
    for (RelationId r = 0; r < kg.relation_count(); ++r) {
        const auto& idx = kg.triples_with_relation(r);
        if (idx.empty())
            continue;
        auto rv = model.relation(r);
        double acc = 0.0;
        std::size_t zeros = 0;
        for (std::size_t i : idx) {
            const Triple& t = kg.triples()[i];
            auto h = model.entity(t.head);
            for (std::size_t j = 0; j < d; ++j)
                hr[j] = h[j] + rv[j];
            auto tv = model.entity(t.tail);
            if (is_zero(hr) || is_zero(tv))
                ++zeros;
            acc += cosine(hr, tv);
        }
        const auto& label = kg.relations().label(r);
        if (zeros)
            out.warnings.push_back("transitional: " + std::to_string(zeros) + " zero vector(s) for relation '" +
                                   label + "'");
        out.values[label] = std::clamp(acc / static_cast<double>(idx.size()), -1.0, 1.0);
    }
    return out;
}

EvalReport eval_report(const EmbeddingModel& model, const KnowledgeGraph& kg, std::size_t k, std::string timestamp) {
    EvalReport r;
    r.algorithm = std::string(to_string(model.algorithm()));
    r.dimension = model.dim();
    r.k = k;
    r.timestamp = std::move(timestamp);
    r.categorization = categorization(model, kg);
    r.coherence = coherence(model, kg, k);
    if (model.has_vector_relations()) {
        r.transitional = transitional_distance(model, kg);
    } else {
        r.transitional_supported = false;
        r.transitional_reason = "unsupported for " + r.algorithm + ": relations are matrices, not vectors";
    }
    return r;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson section_json(const MetricScores& m, const char* key_name) {
    ojson j;
    j[key_name] = ojson::object();
    for (const auto& [k, v] : m.values)
        j[key_name][k] = v;
    if (auto mac = m.macro())
        j["macro"] = *mac;
    else
        j["macro"] = nullptr;
    j["warnings"] = m.warnings;
    return j;
}

MetricScores section_from_json(const nlohmann::json& j, const char* key_name) {
    MetricScores m;
    for (const auto& [k, v] : j.at(key_name).items())
        m.values[k] = v.get<double>();
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    return m;
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
    ojson j;
    j["metadata"] = {{"algorithm", r.algorithm}, {"dimension", r.dimension}, {"k", r.k}, {"timestamp", r.timestamp}};
    j["categorization"] = section_json(r.categorization, "per_class");
    j["coherence"] = section_json(r.coherence, "per_class");
    auto t = section_json(r.transitional, "per_relation");
    ojson tj;
    tj["supported"] = r.transitional_supported;
    tj["reason"] = r.transitional_reason;
    for (auto& [k, v] : t.items())
        tj[k] = v;
    j["transitional"] = tj;
    return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view json_text) {
    try {
        auto j = nlohmann::json::parse(json_text);
        EvalReport r;
        const auto& meta = j.at("metadata");
        r.algorithm = meta.at("algorithm").get<std::string>();
        r.dimension = meta.at("dimension").get<std::size_t>();
        r.k = meta.at("k").get<std::size_t>();
        r.timestamp = meta.at("timestamp").get<std::string>();
        r.categorization = section_from_json(j.at("categorization"), "per_class");
        r.coherence = section_from_json(j.at("coherence"), "per_class");
        const auto& t = j.at("transitional");
        r.transitional_supported = t.at("supported").get<bool>();
        r.transitional_reason = t.at("reason").get<std::string>();
        r.transitional = section_from_json(t, "per_relation");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed report JSON: ") + e.what());
    }
}

namespace {

std::string fmt(std::optional<double> v) {
    if (!v)
        return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << *v;
    return os.str();
}

std::optional<double> lookup(const MetricScores& m, const std::string& key) {
    auto it = m.values.find(key);
    if (it == m.values.end())
        return std::nullopt;
    return it->second;
}

}  // namespace

std::string report_to_text(const EvalReport& r) {
    std::ostringstream os;
    os << r.algorithm << " d=" << r.dimension << " k=" << r.k;
    if (!r.timestamp.empty())
        os << "  " << r.timestamp;
    os << "\n\n";

    std::set<std::string> classes;
    for (const auto& [k, v] : r.categorization.values)
        classes.insert(k);
    for (const auto& [k, v] : r.coherence.values)
        classes.insert(k);
    std::size_t w = 5;
    for (const auto& c : classes)
        w = std::max(w, c.size());
    for (const auto& [k, v] : r.transitional.values)
        w = std::max(w, k.size());
    const int cw = static_cast<int>(w) + 2;

    os << std::left << std::setw(cw) << "class" << std::right << std::setw(16) << "categorization" << std::setw(12)
       << "coherence" << '\n';
    os << std::string(static_cast<std::size_t>(cw) + 28, '-') << '\n';
    for (const auto& c : classes)
        os << std::left << std::setw(cw) << c << std::right << std::setw(16) << fmt(lookup(r.categorization, c))
           << std::setw(12) << fmt(lookup(r.coherence, c)) << '\n';
    os << std::left << std::setw(cw) << "macro" << std::right << std::setw(16) << fmt(r.categorization.macro())
       << std::setw(12) << fmt(r.coherence.macro()) << "\n\n";

    os << std::left << std::setw(cw) << "relation" << std::right << std::setw(16) << "transitional" << '\n';
    os << std::string(static_cast<std::size_t>(cw) + 16, '-') << '\n';
    if (!r.transitional_supported) {
        os << "(" << r.transitional_reason << ")\n";
    } else {
        for (const auto& [k, v] : r.transitional.values)
            os << std::left << std::setw(cw) << k << std::right << std::setw(16) << fmt(v) << '\n';
        os << std::left << std::setw(cw) << "macro" << std::right << std::setw(16) << fmt(r.transitional.macro())
           << '\n';
    }
    for (const auto& w8 : r.warnings())
        os << "warning: " << w8 << '\n';
    return os.str();
}

}  // namespace skge
