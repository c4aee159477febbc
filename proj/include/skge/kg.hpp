#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace skge {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

inline constexpr std::string_view kDefaultTypeRelation = "type";
inline constexpr std::string_view kSubClassOfRelation = "subClassOf";

/// Dense label interning table. Ids are assigned 0..size()-1 in first-intern
/// order; interning an existing label returns its id.
class Vocab {
public:
    /// Throws ValidationError for empty labels or labels containing tab,
    /// carriage return or newline.
    std::uint32_t intern(std::string_view label);

    std::optional<std::uint32_t> find(std::string_view label) const;
    const std::string& label(std::uint32_t id) const { return labels_.at(id); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }

    friend bool operator==(const Vocab& a, const Vocab& b) { return a.labels_ == b.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

struct Triple {
    EntityId head = 0;
    RelationId relation = 0;
    EntityId tail = 0;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct LabelTriple {
    std::string head;
    std::string relation;
    std::string tail;

    friend bool operator==(const LabelTriple&, const LabelTriple&) = default;
    friend auto operator<=>(const LabelTriple&, const LabelTriple&) = default;
};

struct KGStats {
    std::size_t triple_count = 0;
    std::size_t entity_count = 0;
    std::size_t relation_count = 0;
    std::map<std::string, std::size_t> per_relation_counts;

    friend bool operator==(const KGStats&, const KGStats&) = default;
};

/// Immutable, deduplicated triple set over interned vocabularies with a
/// per-relation index and an rdf:type-style index.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    /// Builds a graph from label triples, interning heads/tails and relations
    /// in first-appearance order and dropping duplicates. The relation whose
    /// label equals `type_relation` (if present) drives the type index.
    static KnowledgeGraph from_labels(const std::vector<LabelTriple>& triples,
                                      std::string_view type_relation = kDefaultTypeRelation);

    const Vocab& entities() const noexcept { return entities_; }
    const Vocab& relations() const noexcept { return relations_; }
    const std::vector<Triple>& triples() const noexcept { return triples_; }
    std::size_t entity_count() const noexcept { return entities_.size(); }
    std::size_t relation_count() const noexcept { return relations_.size(); }
    std::size_t triple_count() const noexcept { return triples_.size(); }
    bool empty() const noexcept { return triples_.empty(); }

    std::optional<RelationId> type_relation() const noexcept { return type_relation_; }

    /// Indexes into triples() for relation `r`, ascending.
    const std::vector<std::size_t>& triples_with_relation(RelationId r) const { return by_relation_.at(r); }

    /// Sorted class ids `c` with (e, type, c) in the graph.
    const std::vector<EntityId>& types_of(EntityId e) const { return types_of_.at(e); }

    /// Sorted instance ids `e` with (e, type, c) in the graph. Empty for
    /// entities that are not classes.
    const std::vector<EntityId>& instances_of(EntityId c) const { return instances_of_.at(c); }

    bool has_type(EntityId e, EntityId c) const;

    /// Entities used as a class: every tail of the type relation plus both
    /// ends of any "subClassOf" triple.
    const std::vector<bool>& class_mask() const noexcept { return is_class_; }

    /// Class ids with at least one instance, ascending.
    std::vector<EntityId> classes_with_instances() const;

    LabelTriple labels_of(const Triple& t) const;
    std::vector<LabelTriple> label_triples() const;

private:
    Vocab entities_;
    Vocab relations_;
    std::vector<Triple> triples_;
    std::optional<RelationId> type_relation_;
    std::vector<std::vector<std::size_t>> by_relation_;
    std::vector<std::vector<EntityId>> types_of_;
    std::vector<std::vector<EntityId>> instances_of_;
    std::vector<bool> is_class_;
};

/// Parses tab-separated "head<TAB>relation<TAB>tail" lines. Blank lines and
/// lines starting with '#' are skipped. A trailing '\r' is tolerated.
/// Throws ParseError (with 1-based line number) on malformed lines.
KnowledgeGraph parse_triples(std::string_view text,
                             std::string_view type_relation = kDefaultTypeRelation);

/// Serializes one line per triple, lines sorted lexicographically.
std::string write_triples(const KnowledgeGraph& kg);

KGStats stats(const KnowledgeGraph& kg);

std::string stats_to_json(const KGStats& s);
std::string stats_to_text(const KGStats& s);

std::string read_file(const std::string& path);
/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::string& path, std::string_view contents);

}  // namespace skge
