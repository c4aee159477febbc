#include "skge/kg.hpp"

#include "skge/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_set>

namespace skge {

std::uint32_t Vocab::intern(std::string_view label) {
    if (label.empty())
        throw ValidationError("empty label");
    if (label.find_first_of("\t\n\r") != std::string_view::npos)
        throw ValidationError("label contains tab or newline: '" + std::string(label) + "'");
    std::string key(label);
    if (auto it = index_.find(key); it != index_.end())
        return it->second;
    auto id = static_cast<std::uint32_t>(labels_.size());
    labels_.push_back(key);
    index_.emplace(std::move(key), id);
    return id;
}

std::optional<std::uint32_t> Vocab::find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

namespace {

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
        std::uint64_t h = t.head;
        h = h * 0x9E3779B97F4A7C15ull ^ t.relation;
        h = h * 0x9E3779B97F4A7C15ull ^ t.tail;
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

}  // namespace

KnowledgeGraph KnowledgeGraph::from_labels(const std::vector<LabelTriple>& triples,
                                           std::string_view type_relation) {
    KnowledgeGraph kg;
    std::unordered_set<Triple, TripleHash> seen;
    seen.reserve(triples.size());
    for (const auto& lt : triples) {
        Triple t;
        t.head = kg.entities_.intern(lt.head);
        t.relation = kg.relations_.intern(lt.relation);
        t.tail = kg.entities_.intern(lt.tail);
        if (seen.insert(t).second)
            kg.triples_.push_back(t);
    }

    const auto n = kg.entities_.size();
    kg.by_relation_.assign(kg.relations_.size(), {});
    kg.types_of_.assign(n, {});
    kg.instances_of_.assign(n, {});
    kg.is_class_.assign(n, false);
    if (!type_relation.empty())
        kg.type_relation_ = kg.relations_.find(type_relation);
    auto subclass = kg.relations_.find(kSubClassOfRelation);

    for (std::size_t i = 0; i < kg.triples_.size(); ++i) {
        const Triple& t = kg.triples_[i];
        kg.by_relation_[t.relation].push_back(i);
        if (kg.type_relation_ && t.relation == *kg.type_relation_) {
            kg.types_of_[t.head].push_back(t.tail);
            kg.instances_of_[t.tail].push_back(t.head);
            kg.is_class_[t.tail] = true;
        }
        if (subclass && t.relation == *subclass) {
            kg.is_class_[t.head] = true;
            kg.is_class_[t.tail] = true;
        }
    }
    for (auto& v : kg.types_of_)
        std::sort(v.begin(), v.end());
    for (auto& v : kg.instances_of_)
        std::sort(v.begin(), v.end());
    return kg;
}

bool KnowledgeGraph::has_type(EntityId e, EntityId c) const {
    const auto& ts = types_of_.at(e);
    return std::binary_search(ts.begin(), ts.end(), c);
}

std::vector<EntityId> KnowledgeGraph::classes_with_instances() const {
    std::vector<EntityId> out;
    for (EntityId c = 0; c < instances_of_.size(); ++c)
        if (!instances_of_[c].empty())
            out.push_back(c);
    return out;
}

LabelTriple KnowledgeGraph::labels_of(const Triple& t) const {
    return {entities_.label(t.head), relations_.label(t.relation), entities_.label(t.tail)};
}

std::vector<LabelTriple> KnowledgeGraph::label_triples() const {
    std::vector<LabelTriple> out;
    out.reserve(triples_.size());
    for (const auto& t : triples_)
        out.push_back(labels_of(t));
    return out;
}

KnowledgeGraph parse_triples(std::string_view text, std::string_view type_relation) {
    std::vector<LabelTriple> triples;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty() || line.front() == '#')
            continue;

        std::string_view fields[3];
        std::size_t start = 0;
        int count = 0;
        while (true) {
            auto tab = line.find('\t', start);
            if (count == 3)
                throw ParseError(line_no, "expected 3 tab-separated fields, found more");
            fields[count++] = line.substr(start, tab == std::string_view::npos ? tab : tab - start);
            if (tab == std::string_view::npos)
                break;
            start = tab + 1;
        }
        if (count != 3)
            throw ParseError(line_no, "expected 3 tab-separated fields, found " + std::to_string(count));
        for (const auto& f : fields)
            if (f.empty())
                throw ParseError(line_no, "empty field");
        triples.push_back({std::string(fields[0]), std::string(fields[1]), std::string(fields[2])});
    }
    return KnowledgeGraph::from_labels(triples, type_relation);
}

std::string write_triples(const KnowledgeGraph& kg) {
    std::vector<std::string> lines;
    lines.reserve(kg.triple_count());
    for (const auto& t : kg.triples()) {
        auto lt = kg.labels_of(t);
        lines.push_back(lt.head + '\t' + lt.relation + '\t' + lt.tail + '\n');
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines)
        out += l;
    return out;
}

KGStats stats(const KnowledgeGraph& kg) {
    KGStats s;
    s.triple_count = kg.triple_count();
    s.entity_count = kg.entity_count();
    s.relation_count = kg.relation_count();
    for (RelationId r = 0; r < kg.relation_count(); ++r)
        s.per_relation_counts[kg.relations().label(r)] = kg.triples_with_relation(r).size();
    return s;
}

std::string stats_to_json(const KGStats& s) {
    nlohmann::ordered_json j;
    j["triple_count"] = s.triple_count;
    j["entity_count"] = s.entity_count;
    j["relation_count"] = s.relation_count;
    j["per_relation_counts"] = nlohmann::ordered_json::object();
    for (const auto& [label, count] : s.per_relation_counts)
        j["per_relation_counts"][label] = count;
    return j.dump(2) + "\n";
}

std::string stats_to_text(const KGStats& s) {
    std::size_t width = 8;
    for (const auto& [label, count] : s.per_relation_counts)
        width = std::max(width, label.size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(width) + 3) << "triples" << s.triple_count << '\n'
       << std::setw(static_cast<int>(width) + 3) << "entities" << s.entity_count << '\n'
       << std::setw(static_cast<int>(width) + 3) << "relations" << s.relation_count << '\n';
    if (!s.per_relation_counts.empty())
        os << '\n';
    for (const auto& [label, count] : s.per_relation_counts)
        os << "  " << std::setw(static_cast<int>(width) + 1) << label << count << '\n';
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw IoError("read failed for '" + path + "'");
    return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view contents) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out)
            throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into '" + path + "'");
    }
}

}  // namespace skge
