// scene-kge: command-line front end over the skge C API.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 numeric failure during training.

#include "skge/skge.h"

#include "manifest.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct CliFailure {
    int code;
    std::string message;
};

int exit_code_for(skge_status s) {
    switch (s) {
    case SKGE_OK: return kExitOk;
    case SKGE_ERR_INVALID_ARGUMENT: return kExitUsage;
    case SKGE_ERR_NUMERIC: return kExitNumeric;
    default: return kExitData;
    }
}

void check(skge_status s) {
    if (s != SKGE_OK)
        throw CliFailure{exit_code_for(s), std::string(skge_status_name(s)) + ": " + skge_last_error()};
}

struct KgFree {
    void operator()(skge_kg* p) const { skge_kg_free(p); }
};
struct ModelFree {
    void operator()(skge_model* p) const { skge_model_free(p); }
};
using KgPtr = std::unique_ptr<skge_kg, KgFree>;
using ModelPtr = std::unique_ptr<skge_model, ModelFree>;

class CString {
public:
    CString() = default;
    CString(const CString&) = delete;
    CString& operator=(const CString&) = delete;
    ~CString() { skge_string_free(p_); }
    char** out() { return &p_; }
    std::string str() const { return p_ ? std::string(p_) : std::string(); }

private:
    char* p_ = nullptr;
};

std::string read_input(const std::string& path) {
    try {
        return scene_kge::read_text(path);
    } catch (const std::exception& e) {
        throw CliFailure{kExitData, e.what()};
    }
}

void write_output(const std::string& path, std::string_view contents) {
    try {
        scene_kge::write_atomic(path, contents);
    } catch (const std::exception& e) {
        throw CliFailure{kExitData, e.what()};
    }
}

KgPtr load_kg(const std::string& path, const std::string& type_relation) {
    skge_kg* kg = nullptr;
    check(skge_kg_load(path.c_str(), type_relation.c_str(), &kg));
    return KgPtr(kg);
}

ModelPtr load_model(const std::string& path) {
    skge_model* m = nullptr;
    check(skge_model_load(path.c_str(), &m));
    return ModelPtr(m);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        if (comma == std::string::npos)
            comma = s.size();
        if (comma > start)
            out.push_back(s.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
    std::vector<const char*> out;
    for (const auto& s : v)
        out.push_back(s.c_str());
    return out;
}

// ISO-8601 UTC; honours SOURCE_DATE_EPOCH so reruns can be byte-identical.
std::string run_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
        try {
            t = static_cast<std::time_t>(std::stoll(sde));
        } catch (const std::exception&) {
            throw CliFailure{kExitUsage, "SOURCE_DATE_EPOCH must be an integer"};
        }
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---- config files ---------------------------------------------------------
//
// A JSON config supplies flag values: top-level scalars apply to any
// subcommand that has a flag of that name, and an object keyed by the
// subcommand name applies to that subcommand only (unknown keys there are an
// error). Config values are injected ahead of the command-line arguments and
// every option keeps its last value, so explicit flags win.

std::string config_value(const nlohmann::json& v) {
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_array()) {
        std::string out;
        for (const auto& e : v) {
            if (!out.empty())
                out += ',';
            out += e.is_string() ? e.get<std::string>() : e.dump();
        }
        return out;
    }
    return v.dump();
}

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0)
            return args[i].substr(9);
    }
    return std::nullopt;
}

std::vector<std::string> inject_config(CLI::App& app, std::vector<std::string> args) {
    auto path = find_config_path(args);
    if (!path)
        return args;

    std::size_t sub_pos = args.size();
    CLI::App* sub = nullptr;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            ++i;
            continue;
        }
        if (auto* s = app.get_subcommand_no_throw(args[i])) {
            sub = s;
            sub_pos = i;
            break;
        }
    }
    if (!sub)
        return args;

    nlohmann::json cfg;
    try {
        cfg = nlohmann::json::parse(read_input(*path));
    } catch (const nlohmann::json::exception& e) {
        throw CliFailure{kExitUsage, "config '" + *path + "': " + e.what()};
    }
    if (!cfg.is_object())
        throw CliFailure{kExitUsage, "config '" + *path + "': expected a JSON object"};

    std::vector<std::string> injected;
    auto add = [&](const std::string& key, const nlohmann::json& v, bool strict) {
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt || key == "config") {
            if (strict)
                throw CliFailure{kExitUsage, "config '" + *path + "': unknown key '" + key + "' for " + sub->get_name()};
            return;
        }
        if (opt->get_expected_max() == 0 || v.is_boolean()) {
            injected.push_back("--" + key + "=" + config_value(v));
            return;
        }
        injected.push_back("--" + key);
        injected.push_back(config_value(v));
    };
    for (const auto& [key, v] : cfg.items())
        if (!v.is_object())
            add(key, v, false);
    if (auto it = cfg.find(sub->get_name()); it != cfg.end()) {
        if (!it->is_object())
            throw CliFailure{kExitUsage, "config '" + *path + "': section '" + sub->get_name() + "' must be an object"};
        for (const auto& [key, v] : it->items())
            add(key, v, true);
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, injected.begin(), injected.end());
    return args;
}

nlohmann::ordered_json resolved_options(const CLI::App& sub) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        std::string name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "config" || name == "manifest")
            continue;
        const auto& res = opt->results();
        if (!res.empty())
            j[name] = res.back();
        else if (!opt->get_default_str().empty())
            j[name] = opt->get_default_str();
    }
    return j;
}

// ---- subcommands ------------------------------------------------------------

struct Common {
    std::string config;
    std::string manifest;
    std::string output;
};

struct GenKgArgs {
    std::string scenes, ontology;
};
struct TrainArgs {
    std::string kg;
    std::string algo = "transe";
    std::uint32_t dim = 100;
    std::uint32_t epochs = 100;
    double lr = 0.01;
    double margin = 1.0;
    std::uint64_t seed = 0;
    std::uint32_t threads = 1;
    std::uint32_t batch_size = 128;
    std::uint32_t negatives = 1;
    std::string norm = "L2";
    std::string normalize = "auto";
    double l2 = -1.0;
    std::uint64_t rescal_budget = 50'000'000;
    std::string type_relation = "type";
    std::string history;
    bool quiet = false;
};
struct EvalArgs {
    std::string model, kg;
    std::uint32_t k = 10;
    std::string type_relation = "type";
};
struct SimilarArgs {
    std::string model, scenes;
    std::uint32_t top_k = 10;
};
struct NeighborsArgs {
    std::string model, entity;
    std::uint32_t k = 10;
};
struct ProjectArgs {
    std::string model, method = "tsne", svg, kg, entities;
    double perplexity = 30.0;
    double learning_rate = 200.0;
    double exaggeration = 12.0;
    std::uint32_t iterations = 1000;
    std::uint32_t exaggeration_iters = 250;
    std::uint64_t seed = 0;
    std::string type_relation = "type";
};
struct StatsArgs {
    std::string kg;
    std::string type_relation = "type";
};

void add_common(CLI::App* sub, Common& c, bool output_required, const std::string& output_help) {
    sub->add_option("--config", c.config, "JSON config file (flags override)");
    sub->add_option("--manifest", c.manifest, "Run manifest path (default: <output>.manifest.json)");
    auto* o = sub->add_option("-o,--output", c.output, output_help);
    if (output_required)
        o->required();
}

void epoch_logger(void* user, std::uint32_t epoch, double loss, double viol, double seconds) {
    const auto* total = static_cast<const std::uint32_t*>(user);
    std::cerr << "epoch " << epoch << "/" << *total << "  loss=" << loss << "  violations=" << viol << "  ("
              << seconds << "s)\n";
}

}  // namespace

int main(int argc, char** argv) {
    const auto start = std::chrono::steady_clock::now();

    CLI::App app{"Scene knowledge-graph embedding toolkit"};
    app.set_version_flag("--version", std::string(skge_version()));
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    std::string top_config;
    app.add_option("--config", top_config, "JSON config file (flags override)");

    Common common;
    GenKgArgs gen;
    TrainArgs tr;
    EvalArgs ev;
    SimilarArgs sim;
    NeighborsArgs nb;
    ProjectArgs pj;
    StatsArgs st;

    auto* gen_cmd = app.add_subcommand("gen-kg", "Generate a scene knowledge graph (TSV) from annotation JSON");
    gen_cmd->add_option("scenes", gen.scenes, "Scene annotation JSON")->required();
    gen_cmd->add_option("ontology", gen.ontology, "Ontology config JSON")->required();
    add_common(gen_cmd, common, true, "Output triple TSV");

    auto* train_cmd = app.add_subcommand("train", "Train TransE / RESCAL / HolE embeddings");
    train_cmd->add_option("kg", tr.kg, "Triple TSV")->required();
    train_cmd->add_option("--algo", tr.algo, "transe | rescal | hole")
        ->check(CLI::IsMember({"transe", "rescal", "hole"}, CLI::ignore_case));
    train_cmd->add_option("--dim", tr.dim, "Embedding dimension")->check(CLI::PositiveNumber);
    train_cmd->add_option("--epochs", tr.epochs, "Training epochs")->check(CLI::PositiveNumber);
    train_cmd->add_option("--lr", tr.lr, "SGD learning rate")->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--margin", tr.margin, "Ranking margin")->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", tr.seed, "Random seed");
    train_cmd->add_option("--threads", tr.threads, "Worker threads (>1 is non-deterministic)")
        ->envname("SCENE_KGE_THREADS")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--batch-size", tr.batch_size, "Triples per batch")->check(CLI::PositiveNumber);
    train_cmd->add_option("--negatives", tr.negatives, "Negatives per positive")->check(CLI::PositiveNumber);
    train_cmd->add_option("--norm", tr.norm, "TransE distance norm")
        ->check(CLI::IsMember({"L1", "L2"}, CLI::ignore_case));
    train_cmd->add_option("--normalize", tr.normalize, "Entity unit-ball projection: auto | on | off")
        ->check(CLI::IsMember({"auto", "on", "off"}, CLI::ignore_case));
    train_cmd->add_option("--l2", tr.l2, "L2 weight decay (negative: algorithm default)");
    train_cmd->add_option("--rescal-budget", tr.rescal_budget, "Warn when RESCAL relation parameters exceed this");
    train_cmd->add_option("--type-relation", tr.type_relation, "Label of the typing relation");
    train_cmd->add_option("--history", tr.history, "Write per-epoch history JSON here");
    train_cmd->add_flag("--quiet", tr.quiet, "Suppress per-epoch log lines");
    add_common(train_cmd, common, true, "Output model file");

    auto* eval_cmd = app.add_subcommand("eval", "Intrinsic evaluation: categorization, coherence, transitional distance");
    eval_cmd->add_option("model", ev.model, "Model file")->required();
    eval_cmd->add_option("kg", ev.kg, "Triple TSV the model was trained on")->required();
    eval_cmd->add_option("--k", ev.k, "Coherence neighborhood size")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--type-relation", ev.type_relation, "Label of the typing relation");
    add_common(eval_cmd, common, false, "Write the report JSON here");

    auto* sim_cmd = app.add_subcommand("similar", "Rank scene pairs by cosine similarity");
    sim_cmd->add_option("model", sim.model, "Model file")->required();
    sim_cmd->add_option("--scenes", sim.scenes, "Comma-separated scene ids")->required();
    sim_cmd->add_option("--top-k", sim.top_k, "Pairs to report")->check(CLI::PositiveNumber);
    add_common(sim_cmd, common, false, "Write the result JSON here");

    auto* nb_cmd = app.add_subcommand("neighbors", "Nearest neighbors of an entity by cosine");
    nb_cmd->add_option("model", nb.model, "Model file")->required();
    nb_cmd->add_option("--entity", nb.entity, "Entity label")->required();
    nb_cmd->add_option("--k", nb.k, "Neighbors to report")->check(CLI::PositiveNumber);
    add_common(nb_cmd, common, false, "Write the result JSON here");

    auto* pj_cmd = app.add_subcommand("project", "2D projection of entity embeddings (CSV, optional SVG)");
    pj_cmd->add_option("model", pj.model, "Model file")->required();
    pj_cmd->add_option("--method", pj.method, "tsne | pca")->check(CLI::IsMember({"tsne", "pca"}, CLI::ignore_case));
    pj_cmd->add_option("--perplexity", pj.perplexity, "t-SNE perplexity");
    pj_cmd->add_option("--iterations", pj.iterations, "t-SNE iterations");
    pj_cmd->add_option("--learning-rate", pj.learning_rate, "t-SNE learning rate");
    pj_cmd->add_option("--exaggeration", pj.exaggeration, "t-SNE early exaggeration factor");
    pj_cmd->add_option("--exaggeration-iters", pj.exaggeration_iters, "t-SNE early exaggeration iterations");
    pj_cmd->add_option("--seed", pj.seed, "Random seed");
    pj_cmd->add_option("--svg", pj.svg, "Also write an SVG scatter plot");
    pj_cmd->add_option("--kg", pj.kg, "Triple TSV used to label points with their class");
    pj_cmd->add_option("--entities", pj.entities, "Comma-separated entity labels (default: all)");
    pj_cmd->add_option("--type-relation", pj.type_relation, "Label of the typing relation");
    add_common(pj_cmd, common, true, "Output CSV");

    auto* st_cmd = app.add_subcommand("stats", "Triple, entity and relation counts");
    st_cmd->add_option("kg", st.kg, "Triple TSV")->required();
    st_cmd->add_option("--type-relation", st.type_relation, "Label of the typing relation");
    add_common(st_cmd, common, false, "Write the statistics JSON here");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = inject_config(app, std::move(args));
        std::reverse(args.begin(), args.end());
        try {
            app.parse(args);
        } catch (const CLI::ParseError& e) {
            const int rc = app.exit(e);
            return rc == 0 ? kExitOk : kExitUsage;
        }

        CLI::App* sub = app.get_subcommands().front();
        scene_kge::RunManifest manifest;
        manifest.subcommand = sub->get_name();
        manifest.tool_version = skge_version();
        manifest.config = resolved_options(*sub);

        if (sub == gen_cmd) {
            const std::string scenes = read_input(gen.scenes);
            const std::string ontology = read_input(gen.ontology);
            skge_kg* raw = nullptr;
            check(skge_kg_from_scenes(scenes.c_str(), ontology.c_str(), &raw));
            KgPtr kg(raw);
            CString tsv, stats;
            check(skge_kg_to_tsv(kg.get(), tsv.out()));
            check(skge_kg_stats(kg.get(), nullptr, stats.out()));
            write_output(common.output, tsv.str());
            std::cout << stats.str();
            manifest.inputs = {gen.scenes, gen.ontology};
            manifest.outputs = {common.output};
        } else if (sub == train_cmd) {
            KgPtr kg = load_kg(tr.kg, tr.type_relation);
            skge_model_config mc;
            skge_model_config_init(&mc);
            const std::string algo = CLI::detail::to_lower(tr.algo);
            mc.algorithm = algo == "rescal" ? SKGE_ALGO_RESCAL : algo == "hole" ? SKGE_ALGO_HOLE : SKGE_ALGO_TRANSE;
            mc.dimension = tr.dim;
            mc.transe_norm = CLI::detail::to_lower(tr.norm) == "l1" ? SKGE_NORM_L1 : SKGE_NORM_L2;
            mc.seed = tr.seed;
            skge_model* raw = nullptr;
            check(skge_model_init(kg.get(), &mc, &raw));
            ModelPtr model(raw);

            skge_train_config tc;
            skge_train_config_init(&tc);
            tc.epochs = tr.epochs;
            tc.batch_size = tr.batch_size;
            tc.learning_rate = tr.lr;
            tc.margin = tr.margin;
            tc.negatives_per_positive = tr.negatives;
            const std::string norm_mode = CLI::detail::to_lower(tr.normalize);
            tc.normalize_entities = norm_mode == "on" ? 1 : norm_mode == "off" ? 0 : -1;
            tc.l2_reg = tr.l2;
            tc.seed = tr.seed;
            tc.threads = tr.threads;
            tc.rescal_parameter_budget = tr.rescal_budget;
            CString history;
            check(skge_model_train(model.get(), kg.get(), &tc, tr.quiet ? nullptr : epoch_logger, &tr.epochs,
                                   history.out()));
            for (const auto& w : nlohmann::json::parse(history.str()).at("warnings"))
                std::cerr << "warning: " << w.get<std::string>() << '\n';
            check(skge_model_save(model.get(), common.output.c_str()));
            manifest.outputs = {common.output, common.output + ".entities.txt", common.output + ".relations.txt"};
            if (!tr.history.empty()) {
                write_output(tr.history, history.str());
                manifest.outputs.push_back(tr.history);
            }
            manifest.inputs = {tr.kg};
            manifest.seed = tr.seed;
        } else if (sub == eval_cmd) {
            ModelPtr model = load_model(ev.model);
            KgPtr kg = load_kg(ev.kg, ev.type_relation);
            CString json, text;
            const std::string stamp = run_timestamp();
            check(skge_eval(model.get(), kg.get(), ev.k, stamp.c_str(), json.out(), text.out()));
            std::cout << text.str();
            if (!common.output.empty()) {
                write_output(common.output, json.str());
                manifest.outputs = {common.output};
            }
            manifest.inputs = {ev.model, ev.kg};
        } else if (sub == sim_cmd) {
            ModelPtr model = load_model(sim.model);
            const auto ids = split_list(sim.scenes);
            const auto cids = c_strings(ids);
            CString json, text;
            check(skge_similar_scenes(model.get(), cids.data(), cids.size(), sim.top_k, json.out(), text.out()));
            std::cout << text.str();
            if (!common.output.empty()) {
                write_output(common.output, json.str());
                manifest.outputs = {common.output};
            }
            manifest.inputs = {sim.model};
        } else if (sub == nb_cmd) {
            ModelPtr model = load_model(nb.model);
            CString json, text;
            check(skge_neighbors(model.get(), nb.entity.c_str(), nb.k, json.out(), text.out()));
            std::cout << text.str();
            if (!common.output.empty()) {
                write_output(common.output, json.str());
                manifest.outputs = {common.output};
            }
            manifest.inputs = {nb.model};
        } else if (sub == pj_cmd) {
            ModelPtr model = load_model(pj.model);
            KgPtr kg;
            if (!pj.kg.empty())
                kg = load_kg(pj.kg, pj.type_relation);
            skge_project_config pc;
            skge_project_config_init(&pc);
            pc.method = CLI::detail::to_lower(pj.method) == "pca" ? SKGE_PROJECT_PCA : SKGE_PROJECT_TSNE;
            pc.perplexity = pj.perplexity;
            pc.iterations = pj.iterations;
            pc.learning_rate = pj.learning_rate;
            pc.early_exaggeration = pj.exaggeration;
            pc.exaggeration_iterations = pj.exaggeration_iters;
            pc.seed = pj.seed;
            const auto ents = split_list(pj.entities);
            const auto cents = c_strings(ents);
            CString csv, svg;
            check(skge_project(model.get(), kg.get(), cents.data(), cents.size(), &pc, csv.out(),
                               pj.svg.empty() ? nullptr : svg.out()));
            write_output(common.output, csv.str());
            manifest.outputs = {common.output};
            if (!pj.svg.empty()) {
                write_output(pj.svg, svg.str());
                manifest.outputs.push_back(pj.svg);
            }
            manifest.inputs = {pj.model};
            if (!pj.kg.empty())
                manifest.inputs.push_back(pj.kg);
            manifest.seed = pj.seed;
        } else if (sub == st_cmd) {
            KgPtr kg = load_kg(st.kg, st.type_relation);
            CString json, text;
            check(skge_kg_stats(kg.get(), json.out(), text.out()));
            std::cout << text.str();
            if (!common.output.empty()) {
                write_output(common.output, json.str());
                manifest.outputs = {common.output};
            }
            manifest.inputs = {st.kg};
        }

        std::string manifest_path = common.manifest;
        if (manifest_path.empty() && !common.output.empty())
            manifest_path = common.output + ".manifest.json";
        if (!manifest_path.empty()) {
            manifest.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            write_output(manifest_path, manifest.to_json().dump(2) + "\n");
        }
        return kExitOk;
    } catch (const CliFailure& f) {
        std::cerr << "error: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}
