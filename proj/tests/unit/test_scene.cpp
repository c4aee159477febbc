#include "doctest.h"

#include "skge/error.hpp"
#include "skge/scene.hpp"

#include "synthetic.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

using namespace skge;

namespace {

OntologyConfig toy_ontology() { return load_ontology_config(read_file(SKGE_TEST_DATA_DIR "/toy_ontology.json")); }

std::string validation_message(const std::string& json) {
    try {
        load_scene_dataset(json);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("empty dataset") {
    auto ds = load_scene_dataset(R"({"scenes":[]})");
    CHECK(ds.scenes.empty());
    auto kg = emit_triples(ds, toy_ontology());
    CHECK(kg.label_triples() == taxonomy_triples(toy_ontology()));
}

TEST_CASE("minimal dataset shape") {
    auto ds = load_scene_dataset(read_file(SKGE_DATA_DIR "/toy_scenes.json"));
    REQUIRE(ds.scenes.size() == 1);
    CHECK(ds.scenes[0].id == "s");
    CHECK(ds.scenes[0].location == "boston");
    REQUIRE(ds.scenes[0].sub_scenes.size() == 1);
    const auto& sub = ds.scenes[0].sub_scenes[0];
    CHECK(sub.id == "s0");
    REQUIRE(sub.objects.size() == 1);
    CHECK(sub.objects[0].category == "vehicle.car");
    CHECK(sub.objects[0].events == std::vector<std::string>{"parked_car"});
}

TEST_CASE("schema violations name the JSON path") {
    CHECK(validation_message(R"({"scenes":[{"id":"s","location":"x","sub_scenes":[
        {"id":"a","timestamp":1.0,"objects":[]},{"id":"b","timestamp":0.5,"objects":[]}]}]})")
              .find("scenes[0].sub_scenes[1].timestamp") != std::string::npos);
    CHECK(validation_message(R"({"scenes":[{"id":"s","sub_scenes":[]}]})").find("scenes[0].location") !=
          std::string::npos);
    CHECK(validation_message(R"({"scenes":[{"id":"s","location":"x","sub_scenes":[]}]})")
              .find("scenes[0].sub_scenes") != std::string::npos);
    CHECK(validation_message(R"({"scenes":[{"id":"s","location":"x","sub_scenes":[
        {"id":"a","timestamp":-1,"objects":[]}]}]})")
              .find("timestamp") != std::string::npos);
    CHECK(validation_message(R"({"scenes":[{"id":"s","location":"x","sub_scenes":[
        {"id":"a","timestamp":0,"objects":[{"id":"o","category":"","events":[]}]}]}]})")
              .find("scenes[0].sub_scenes[0].objects[0].category") != std::string::npos);
    CHECK(validation_message(R"({"nope":1})").find("scenes") != std::string::npos);
    CHECK_THROWS_AS(load_scene_dataset("{not json"), ValidationError);
}

TEST_CASE("duplicate ids are reported by name") {
    CHECK(validation_message(R"({"scenes":[
        {"id":"dup","location":"x","sub_scenes":[{"id":"a","timestamp":0,"objects":[]}]},
        {"id":"dup","location":"x","sub_scenes":[{"id":"b","timestamp":0,"objects":[]}]}]})")
              .find("dup") != std::string::npos);
    CHECK(validation_message(R"({"scenes":[
        {"id":"s1","location":"x","sub_scenes":[{"id":"same","timestamp":0,"objects":[]}]},
        {"id":"s2","location":"x","sub_scenes":[{"id":"same","timestamp":0,"objects":[]}]}]})")
              .find("same") != std::string::npos);
}

TEST_CASE("equal timestamps are allowed") {
    CHECK_NOTHROW(load_scene_dataset(R"({"scenes":[{"id":"s","location":"x","sub_scenes":[
        {"id":"a","timestamp":1,"objects":[]},{"id":"b","timestamp":1,"objects":[]}]}]})"));
}

TEST_CASE("taxonomy triples by hand") {
    OntologyConfig cfg;
    cfg.foi_taxonomy = {{"vehicle.car", "vehicle"}, {"vehicle", "FeatureOfInterest"}};
    auto t = taxonomy_triples(cfg);
    std::set<LabelTriple> got(t.begin(), t.end());
    CHECK(got == std::set<LabelTriple>{{"vehicle.car", "subClassOf", "vehicle"},
                                       {"vehicle", "subClassOf", "FeatureOfInterest"}});

    CHECK(taxonomy_triples(OntologyConfig{}).empty());

    OntologyConfig ev;
    ev.event_classes = {"parked_car"};
    CHECK(taxonomy_triples(ev) == std::vector<LabelTriple>{{"parked_car", "subClassOf", "Event"}});
}

TEST_CASE("taxonomy cycles and dangling chains are rejected") {
    OntologyConfig cyc;
    cyc.foi_taxonomy = {{"a", "b"}, {"b", "a"}};
    CHECK_THROWS_AS(taxonomy_triples(cyc), ValidationError);
    OntologyConfig dangling;
    dangling.foi_taxonomy = {{"a", "nowhere"}};
    CHECK_THROWS_AS(taxonomy_triples(dangling), ValidationError);
}

TEST_CASE("golden toy graph has exactly the nine instance triples") {
    auto ds = load_scene_dataset(read_file(SKGE_DATA_DIR "/toy_scenes.json"));
    auto inst = instance_triples(ds, toy_ontology());
    std::set<LabelTriple> got(inst.begin(), inst.end());
    const std::set<LabelTriple> expected = {
        {"s", "type", "Scene"},
        {"s", "hasSubScene", "s0"},
        {"s0", "type", "Scene"},
        {"s", "hasLocation", "boston"},
        {"s0", "includes", "o1"},
        {"s0", "includes", "s0/parked_car/o1"},
        {"o1", "type", "vehicle.car"},
        {"s0/parked_car/o1", "type", "parked_car"},
        {"o1", "isParticipantOf", "s0/parked_car/o1"},
    };
    CHECK(inst.size() == 9);
    CHECK(got == expected);

    auto kg = emit_triples(ds, toy_ontology());
    CHECK(kg.triple_count() == 9 + 3);
    CHECK(write_triples(kg) == write_triples(emit_triples(ds, toy_ontology())));
}

TEST_CASE("object with two events") {
    auto ds = load_scene_dataset(R"({"scenes":[{"id":"s","location":"x","sub_scenes":[
        {"id":"s0","timestamp":0,"objects":[{"id":"o","category":"vehicle.car","events":["parked_car","stopped_car"]}]}]}]})");
    OntologyConfig cfg = toy_ontology();
    cfg.event_classes.insert("stopped_car");
    auto inst = instance_triples(ds, cfg);
    auto count = [&](std::string_view rel) {
        return std::count_if(inst.begin(), inst.end(), [&](const LabelTriple& t) { return t.relation == rel; });
    };
    CHECK(count("isParticipantOf") == 2);
    CHECK(count("includes") == 3);  // object + 2 event instances
    CHECK(std::count(inst.begin(), inst.end(), LabelTriple{"o", "isParticipantOf", "s0/stopped_car/o"}) == 1);
}

TEST_CASE("unknown category or event is named") {
    auto ds = load_scene_dataset(R"({"scenes":[{"id":"s","location":"x","sub_scenes":[
        {"id":"s0","timestamp":0,"objects":[{"id":"o","category":"vehicle.tank","events":[]}]}]}]})");
    try {
        instance_triples(ds, toy_ontology());
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("vehicle.tank") != std::string::npos);
    }
    auto ds2 = load_scene_dataset(R"({"scenes":[{"id":"s","location":"x","sub_scenes":[
        {"id":"s0","timestamp":0,"objects":[{"id":"o","category":"vehicle.car","events":["flying_car"]}]}]}]})");
    try {
        instance_triples(ds2, toy_ontology());
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("flying_car") != std::string::npos);
    }
}

TEST_CASE("instance triple count formula on the synthetic dataset") {
    auto ds = load_scene_dataset(skge_test::synthetic_scenes_json());
    auto cfg = load_ontology_config(read_file(SKGE_DATA_DIR "/ontology.json"));
    std::size_t scenes = ds.scenes.size(), subs = 0, objects = 0, events = 0;
    std::map<std::string, std::size_t> events_of;
    for (const auto& s : ds.scenes)
        for (const auto& sub : s.sub_scenes) {
            ++subs;
            for (const auto& o : sub.objects) {
                ++objects;
                events += o.events.size();
                events_of[o.id] += o.events.size();
            }
        }
    auto inst = instance_triples(ds, cfg);
    CHECK(inst.size() == 2 * scenes + 2 * subs + objects + 3 * events + objects);

    std::map<std::string, std::size_t> participations;
    for (const auto& t : inst)
        if (t.relation == "isParticipantOf")
            ++participations[t.head];
    for (const auto& [obj, n] : events_of)
        if (n > 0)
            CHECK(participations[obj] == n);
}

TEST_CASE("bundled synthetic dataset matches its generator") {
    CHECK(read_file(SKGE_DATA_DIR "/synthetic_scenes.json") == skge_test::synthetic_scenes_json());
}

TEST_CASE("synthetic dataset has the advertised shape") {
    auto ds = load_scene_dataset(skge_test::synthetic_scenes_json());
    auto cfg = load_ontology_config(read_file(SKGE_DATA_DIR "/ontology.json"));
    auto kg = emit_triples(ds, cfg);
    std::map<std::string, std::size_t> per_class;
    for (const auto& s : ds.scenes)
        for (const auto& sub : s.sub_scenes)
            for (const auto& o : sub.objects)
                ++per_class[o.category];
    CHECK(per_class.size() == 4);
    for (const auto& [c, n] : per_class)
        CHECK(n == 50);
    CHECK(kg.triple_count() > 1300);
    CHECK(kg.triple_count() < 1700);
}

TEST_CASE("time-of-day buckets are opt-in") {
    auto ds = load_scene_dataset(R"({"scenes":[{"id":"s","location":"x","sub_scenes":[
        {"id":"s0","timestamp":43200,"objects":[]}]}]})");
    auto cfg = toy_ontology();
    auto plain = instance_triples(ds, cfg);
    CHECK(std::none_of(plain.begin(), plain.end(), [](const LabelTriple& t) { return t.relation == "atTimeOfDay"; }));
    cfg.time_of_day_buckets = 4;
    auto bucketed = instance_triples(ds, cfg);
    CHECK(std::count_if(bucketed.begin(), bucketed.end(),
                        [](const LabelTriple& t) { return t.relation == "atTimeOfDay"; }) == 1);
}
