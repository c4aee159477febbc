#include "skge/scene.hpp"

#include "skge/error.hpp"

#include "json.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace skge {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ValidationError(path + "." + key + ": missing required key");
    return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
    const json& v = require(obj, key, path);
    const std::string p = path + "." + key;
    if (!v.is_string())
        throw ValidationError(p + ": expected string");
    auto s = v.get<std::string>();
    if (s.empty())
        throw ValidationError(p + ": must be non-empty");
    if (s.find_first_of("\t\n\r") != std::string::npos)
        throw ValidationError(p + ": contains tab or newline");
    return s;
}

const json& require_array(const json& obj, const char* key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_array())
        throw ValidationError(path + "." + key + ": expected array");
    return v;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("invalid JSON: ") + e.what());
    }
}

std::string idx(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

}  // namespace

SceneDataset load_scene_dataset(std::string_view json_text) {
    json root = parse_json(json_text);
    if (!root.is_object())
        throw ValidationError("$: expected object");
    const json& scenes = require_array(root, "scenes", "$");

    SceneDataset ds;
    std::unordered_set<std::string> scene_ids;
    for (std::size_t si = 0; si < scenes.size(); ++si) {
        const std::string sp = idx("scenes", si);
        const json& js = scenes[si];
        if (!js.is_object())
            throw ValidationError(sp + ": expected object");
        SceneRecord scene;
        scene.id = require_string(js, "id", sp);
        scene.location = require_string(js, "location", sp);
        if (!scene_ids.insert(scene.id).second)
            throw ValidationError("duplicate scene id '" + scene.id + "'");

        const json& subs = require_array(js, "sub_scenes", sp);
        if (subs.empty())
            throw ValidationError(sp + ".sub_scenes: must be non-empty");
        double last_ts = 0.0;
        for (std::size_t ui = 0; ui < subs.size(); ++ui) {
            const std::string up = idx(sp + ".sub_scenes", ui);
            const json& ju = subs[ui];
            if (!ju.is_object())
                throw ValidationError(up + ": expected object");
            SubSceneRecord sub;
            sub.id = require_string(ju, "id", up);
            if (!scene_ids.insert(sub.id).second)
                throw ValidationError("duplicate scene id '" + sub.id + "'");
            const json& ts = require(ju, "timestamp", up);
            if (!ts.is_number())
                throw ValidationError(up + ".timestamp: expected number");
            sub.timestamp = ts.get<double>();
            if (!std::isfinite(sub.timestamp) || sub.timestamp < 0.0)
                throw ValidationError(up + ".timestamp: must be a non-negative finite number");
            if (ui > 0 && sub.timestamp < last_ts)
                throw ValidationError(up + ".timestamp: timestamps must be non-decreasing within a scene");
            last_ts = sub.timestamp;

            std::unordered_set<std::string> object_ids;
            const json& objs = require_array(ju, "objects", up);
            for (std::size_t oi = 0; oi < objs.size(); ++oi) {
                const std::string op = idx(up + ".objects", oi);
                const json& jo = objs[oi];
                if (!jo.is_object())
                    throw ValidationError(op + ": expected object");
                ObjectRecord obj;
                obj.id = require_string(jo, "id", op);
                obj.category = require_string(jo, "category", op);
                if (!object_ids.insert(obj.id).second)
                    throw ValidationError("duplicate object id '" + obj.id + "' in sub-scene '" + sub.id + "'");
                if (auto it = jo.find("events"); it != jo.end()) {
                    if (!it->is_array())
                        throw ValidationError(op + ".events: expected array");
                    for (std::size_t ei = 0; ei < it->size(); ++ei) {
                        const json& ev = (*it)[ei];
                        if (!ev.is_string() || ev.get<std::string>().empty())
                            throw ValidationError(idx(op + ".events", ei) + ": expected non-empty string");
                        obj.events.push_back(ev.get<std::string>());
                    }
                }
                sub.objects.push_back(std::move(obj));
            }
            scene.sub_scenes.push_back(std::move(sub));
        }
        ds.scenes.push_back(std::move(scene));
    }
    return ds;
}

OntologyConfig load_ontology_config(std::string_view json_text) {
    json root = parse_json(json_text);
    if (!root.is_object())
        throw ValidationError("$: expected object");
    OntologyConfig cfg;
    if (auto it = root.find("taxonomy"); it != root.end()) {
        if (!it->is_object())
            throw ValidationError("taxonomy: expected object");
        for (const auto& [child, parent] : it->items()) {
            if (!parent.is_string() || parent.get<std::string>().empty())
                throw ValidationError("taxonomy." + child + ": expected non-empty string");
            cfg.foi_taxonomy[child] = parent.get<std::string>();
        }
    }
    if (auto it = root.find("event_classes"); it != root.end()) {
        if (!it->is_array())
            throw ValidationError("event_classes: expected array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& e = (*it)[i];
            if (!e.is_string() || e.get<std::string>().empty())
                throw ValidationError(idx("event_classes", i) + ": expected non-empty string");
            cfg.event_classes.insert(e.get<std::string>());
        }
    }
    if (auto it = root.find("time_of_day_buckets"); it != root.end()) {
        if (!it->is_number_integer() || it->get<int>() < 0)
            throw ValidationError("time_of_day_buckets: expected non-negative integer");
        cfg.time_of_day_buckets = it->get<int>();
    }
    return cfg;
}

std::vector<LabelTriple> taxonomy_triples(const OntologyConfig& config) {
    const std::string root(cls::kFeatureOfInterest);
    const auto& tax = config.foi_taxonomy;
    if (tax.count(root))
        throw ValidationError("taxonomy: root class '" + root + "' cannot have a parent");

    std::vector<LabelTriple> out;
    for (const auto& [child, parent] : tax) {
        std::unordered_set<std::string> visited{child};
        std::string cur = parent;
        while (cur != root) {
            if (!visited.insert(cur).second)
                throw ValidationError("taxonomy: cycle through '" + cur + "'");
            auto it = tax.find(cur);
            if (it == tax.end())
                throw ValidationError("taxonomy: class '" + child + "' does not resolve to " + root +
                                      " (chain stops at '" + cur + "')");
            cur = it->second;
        }
        out.push_back({child, std::string(rel::kSubClassOf), parent});
    }
    for (const auto& ev : config.event_classes)
        out.push_back({ev, std::string(rel::kSubClassOf), std::string(cls::kEvent)});
    return out;
}

std::string event_instance_id(std::string_view sub_scene, std::string_view event_class,
                              std::string_view object) {
    std::string id;
    id.reserve(sub_scene.size() + event_class.size() + object.size() + 2);
    id.append(sub_scene).append("/").append(event_class).append("/").append(object);
    return id;
}

std::vector<LabelTriple> instance_triples(const SceneDataset& dataset, const OntologyConfig& config) {
    const std::string type(rel::kType), has_sub(rel::kHasSubScene), has_loc(rel::kHasLocation),
        includes(rel::kIncludes), participant(rel::kIsParticipantOf), scene_cls(cls::kScene);

    std::unordered_map<std::string, std::string> object_category;
    std::vector<LabelTriple> out;
    for (const auto& scene : dataset.scenes) {
        out.push_back({scene.id, type, scene_cls});
        out.push_back({scene.id, has_loc, scene.location});
        for (const auto& sub : scene.sub_scenes) {
            out.push_back({scene.id, has_sub, sub.id});
            out.push_back({sub.id, type, scene_cls});
            if (config.time_of_day_buckets > 0) {
                const double day = std::fmod(sub.timestamp, 86400.0);
                auto bucket = static_cast<int>(day / (86400.0 / config.time_of_day_buckets));
                bucket = std::min(bucket, config.time_of_day_buckets - 1);
                out.push_back({sub.id, std::string(rel::kAtTimeOfDay), "timeOfDay/" + std::to_string(bucket)});
            }
            for (const auto& obj : sub.objects) {
                if (!config.foi_taxonomy.count(obj.category))
                    throw ValidationError("unknown object category '" + obj.category + "' (object '" +
                                          obj.id + "')");
                auto [it, fresh] = object_category.emplace(obj.id, obj.category);
                if (!fresh && it->second != obj.category)
                    throw ValidationError("object '" + obj.id + "' has conflicting categories '" +
                                          it->second + "' and '" + obj.category + "'");
                out.push_back({sub.id, includes, obj.id});
                out.push_back({obj.id, type, obj.category});
                for (const auto& ev : obj.events) {
                    if (!config.event_classes.count(ev))
                        throw ValidationError("unknown event class '" + ev + "' (object '" + obj.id + "')");
                    std::string inst = event_instance_id(sub.id, ev, obj.id);
                    out.push_back({sub.id, includes, inst});
                    out.push_back({inst, type, ev});
                    out.push_back({obj.id, participant, inst});
                }
            }
        }
    }
    return out;
}

KnowledgeGraph emit_triples(const SceneDataset& dataset, const OntologyConfig& config) {
    auto triples = taxonomy_triples(config);
    auto inst = instance_triples(dataset, config);
    triples.insert(triples.end(), std::make_move_iterator(inst.begin()), std::make_move_iterator(inst.end()));
    return KnowledgeGraph::from_labels(triples, rel::kType);
}

}  // namespace skge
