#pragma once

#include "skge/kg.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace skge {

// Fixed relation labels emitted for scene graphs.
namespace rel {
inline constexpr std::string_view kType = "type";
inline constexpr std::string_view kSubClassOf = "subClassOf";
inline constexpr std::string_view kHasSubScene = "hasSubScene";
inline constexpr std::string_view kHasLocation = "hasLocation";
inline constexpr std::string_view kIncludes = "includes";
inline constexpr std::string_view kIsParticipantOf = "isParticipantOf";
// Only emitted when time-of-day bucketing is enabled.
inline constexpr std::string_view kAtTimeOfDay = "atTimeOfDay";
}  // namespace rel

// Root classes of the ontology.
namespace cls {
inline constexpr std::string_view kScene = "Scene";
inline constexpr std::string_view kFeatureOfInterest = "FeatureOfInterest";
inline constexpr std::string_view kEvent = "Event";
}  // namespace cls

struct ObjectRecord {
    std::string id;
    std::string category;
    std::vector<std::string> events;
};

struct SubSceneRecord {
    std::string id;
    double timestamp = 0.0;
    std::vector<ObjectRecord> objects;
};

struct SceneRecord {
    std::string id;
    std::string location;
    std::vector<SubSceneRecord> sub_scenes;
};

struct SceneDataset {
    std::vector<SceneRecord> scenes;
};

struct OntologyConfig {
    /// child category -> parent class. Every chain must end at
    /// FeatureOfInterest.
    std::map<std::string, std::string> foi_taxonomy;
    std::set<std::string> event_classes;
    /// 0 disables; otherwise sub-scene timestamps are bucketed into this many
    /// time-of-day entities "timeOfDay/<k>".
    int time_of_day_buckets = 0;
};

/// Parses and validates the scene JSON:
///   {"scenes":[{"id","location","sub_scenes":[{"id","timestamp",
///     "objects":[{"id","category","events":[...]}]}]}]}
/// Throws ValidationError naming the JSON path (e.g. "scenes[0].sub_scenes[1].timestamp")
/// or the duplicated id.
SceneDataset load_scene_dataset(std::string_view json_text);

/// {"taxonomy": {child: parent}, "event_classes": [...], "time_of_day_buckets": N}
/// The last key is optional.
OntologyConfig load_ontology_config(std::string_view json_text);

/// (child, subClassOf, parent) per taxonomy edge and (event, subClassOf, Event)
/// per event class. Throws ValidationError on cycles or chains that do not reach
/// FeatureOfInterest.
std::vector<LabelTriple> taxonomy_triples(const OntologyConfig& config);

/// The instance triples of the dataset (no taxonomy), in emission order.
std::vector<LabelTriple> instance_triples(const SceneDataset& dataset, const OntologyConfig& config);

/// Full scene graph: taxonomy_triples followed by instance_triples.
KnowledgeGraph emit_triples(const SceneDataset& dataset, const OntologyConfig& config);

/// Event instance label "<subSceneId>/<eventClass>/<objectId>".
std::string event_instance_id(std::string_view sub_scene, std::string_view event_class,
                              std::string_view object);

}  // namespace skge
