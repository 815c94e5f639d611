#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "fudge/align.hpp"
#include "fudge/embedding.hpp"
#include "fudge/error.hpp"
#include "fudge/experiments.hpp"
#include "fudge/io.hpp"
#include "fudge/metrics.hpp"
#include "fudge/model.hpp"
#include "fudge/report.hpp"

namespace fudge::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct RunConfig {
    std::string variant = "centroid";
    double alpha = 0.5;
    double insert_cost = 1.0;
    double delete_cost = 1.0;
    std::string embedder = "hash:256";
    std::size_t workers = 1;
    std::uint64_t seed = 1;
    std::string algorithm = "efficient";
    std::string format;

    CostModel cost_model() const {
        CostModel cm{alpha, insert_cost, delete_cost, parse_variant(variant)};
        cm.validate();
        return cm;
    }
};

struct Inputs {
    std::string flow_path;
    std::string buckets_path;
    std::string corpus_path;
    std::string output_path;
};

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::MissingEmbedding:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::ZeroVector:
    case ErrorKind::DegenerateCentroid:
        return 3;
    case ErrorKind::PathExplosion:
        return 4;
    default:
        return 2;
    }
}

std::string provenance(const std::string& command, const RunConfig& rc, const ordered_json& extra = {}) {
    ordered_json config = {{"variant", rc.variant},         {"alpha", rc.alpha},
                           {"insert_cost", rc.insert_cost}, {"delete_cost", rc.delete_cost},
                           {"embedder", rc.embedder},       {"workers", rc.workers},
                           {"seed", rc.seed},               {"algorithm", rc.algorithm}};
    for (const auto& item : extra.items()) {
        config[item.key()] = item.value();
    }
    ordered_json doc = {{"tool", "fudge"}, {"version", std::string(version())}, {"command", command},
                        {"config", std::move(config)}};
    return doc.dump();
}

class Session {
public:
    Session(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    WarningSink warn() {
        return [this](const std::string& msg) { err_ << msg << '\n'; };
    }

    Flow load_flow_files(const Inputs& in) {
        return load_flow(read_file(in.flow_path), read_file(in.buckets_path), warn());
    }

    Corpus load_corpus_file(const std::string& path) { return load_corpus(read_file(path), warn()); }

    /// Builds the embedding table named by `spec` and checks every key the
    /// run needs is present.
    EmbeddingTable resolve_embeddings(const std::string& spec, const BucketSet& buckets,
                                      const std::vector<const Corpus*>& corpora) {
        EmbeddingTable table;
        if (spec.rfind("hash:", 0) == 0) {
            std::size_t dim = 0;
            try {
                dim = std::stoul(spec.substr(5));
            } catch (const std::exception&) {
                throw Error(ErrorKind::InvalidConfig, spec, "expected hash:<dimension>");
            }
            table = EmbeddingTable(dim);
            hash_embed(std::string_view("probe"), dim); // validates the dimension
            add_hash_embeddings(table, buckets);
            for (const Corpus* c : corpora) {
                add_hash_embeddings(table, *c);
            }
            return table;
        }
        if (spec.rfind("table:", 0) == 0) {
            table = load_embeddings(read_file(spec.substr(6)), warn());
            for (const IntentBucket& b : buckets.buckets()) {
                for (const Utterance& u : b.utterances) {
                    table.at(u.id);
                }
            }
            for (const Corpus* c : corpora) {
                for (const Dialogue& d : c->dialogues()) {
                    for (const Utterance& u : d.turns) {
                        table.at(u.id);
                    }
                }
            }
            return table;
        }
        throw Error(ErrorKind::InvalidConfig, spec, "embedder must be table:<path> or hash:<dimension>");
    }

    void emit(const std::string& path, const std::string& content) {
        if (path.empty() || path == "-") {
            out_ << content;
        } else {
            write_file(path, content);
        }
    }

    std::ostream& err() { return err_; }

private:
    std::ostream& out_;
    std::ostream& err_;
};

void add_run_options(CLI::App* cmd, RunConfig& rc, bool with_algorithm) {
    cmd->add_option("--variant", rc.variant, "Intent-utterance distance: min or centroid")
        ->check(CLI::IsMember({"min", "centroid"}))
        ->capture_default_str();
    cmd->add_option("--alpha", rc.alpha, "Substitution cost coefficient")->capture_default_str();
    cmd->add_option("--insert-cost", rc.insert_cost, "Cost per inserted dialogue turn")->capture_default_str();
    cmd->add_option("--delete-cost", rc.delete_cost, "Cost per deleted path node")->capture_default_str();
    cmd->add_option("--embedder", rc.embedder, "table:<path> or hash:<dimension>")->capture_default_str();
    cmd->add_option("--workers", rc.workers, "Parallel scoring threads")->capture_default_str();
    cmd->add_option("--seed", rc.seed, "Seed for every randomized step")->capture_default_str();
    if (with_algorithm) {
        cmd->add_option("--algorithm", rc.algorithm, "efficient or naive")
            ->check(CLI::IsMember({"efficient", "naive"}))
            ->capture_default_str();
    }
}

void add_flow_inputs(CLI::App* cmd, Inputs& in, bool corpus) {
    cmd->add_option("--flow", in.flow_path, "Flow file (JSON)")->required();
    cmd->add_option("--buckets", in.buckets_path, "Bucket file (JSON)")->required();
    if (corpus) {
        cmd->add_option("--corpus", in.corpus_path, "Corpus file (JSONL)")->required();
    }
    cmd->add_option("-o,--output", in.output_path, "Write to this file instead of standard output");
}

std::string flow_name(const Inputs& in) { return fs::path(in.flow_path).stem().string(); }

Algorithm algorithm_of(const RunConfig& rc) {
    return rc.algorithm == "naive" ? Algorithm::Naive : Algorithm::Efficient;
}

// ---------------------------------------------------------------------------
// commands

int cmd_score(Session& s, const Inputs& in, const RunConfig& rc, const std::string& csv_path, bool metrics_only) {
    const CostModel cm = rc.cost_model();
    Flow flow = s.load_flow_files(in);
    Corpus corpus = s.load_corpus_file(in.corpus_path);
    EmbeddingTable table = s.resolve_embeddings(rc.embedder, flow.buckets, {&corpus});
    ScoringContext context(std::move(flow.buckets), std::move(table));
    const MetricReport report = evaluate_flow(corpus, flow.graph, context, cm, rc.workers, algorithm_of(rc));

    const std::string prov = provenance(metrics_only ? "ff1" : "score", rc);
    const std::string name = flow_name(in);
    std::string rendered;
    if (rc.format == "csv") {
        rendered = metric_report_csv(report, name, prov);
    } else if (rc.format == "table") {
        rendered = metric_report_table(report, name);
    } else {
        rendered = metric_report_json(report, name, prov, !metrics_only);
    }
    s.emit(in.output_path, rendered);
    if (!csv_path.empty()) {
        write_file(csv_path, metric_report_csv(report, name, prov));
    }
    return 0;
}

int cmd_align(Session& s, const Inputs& in, const RunConfig& rc, const std::string& dialogue_id) {
    const CostModel cm = rc.cost_model();
    Flow flow = s.load_flow_files(in);
    Corpus corpus = s.load_corpus_file(in.corpus_path);
    const Dialogue& dialogue = corpus.at(dialogue_id);
    Corpus single({dialogue});
    EmbeddingTable table = s.resolve_embeddings(rc.embedder, flow.buckets, {&single});
    ScoringContext context(std::move(flow.buckets), std::move(table));
    const AlignmentTrace trace = backtrace(dialogue, flow.graph, context, cm);

    const std::string prov = provenance("align", rc, {{"dialogue", dialogue_id}});
    std::string rendered;
    if (rc.format == "json") {
        rendered = alignment_json(trace, dialogue, flow.graph, context.buckets(), prov);
    } else if (rc.format == "csv") {
        rendered = alignment_csv(trace, dialogue, flow.graph, context.buckets(), prov);
    } else {
        rendered = alignment_table(trace, dialogue, flow.graph, context.buckets());
    }
    s.emit(in.output_path, rendered);
    return 0;
}

int cmd_sweep(Session& s, const Inputs& in, const RunConfig& rc, std::size_t max_k) {
    const CostModel cm = rc.cost_model();
    Flow flow = s.load_flow_files(in);
    Corpus corpus = s.load_corpus_file(in.corpus_path);
    EmbeddingTable table = s.resolve_embeddings(rc.embedder, flow.buckets, {&corpus});
    ScoringContext context(std::move(flow.buckets), std::move(table));
    auto ranked = rank_paths(flow.graph, corpus, context, cm);
    if (max_k > 0 && ranked.size() > max_k) {
        ranked.resize(max_k);
    }
    const auto points = sweep(flow.graph, ranked, corpus, context, cm, rc.workers);
    const std::string prov = provenance("sweep", rc, {{"max_k", max_k}});
    s.emit(in.output_path, rc.format == "json" ? sweep_json(points, prov) : sweep_csv(points, prov));
    return 0;
}

int cmd_separation(Session& s, const Inputs& in, const RunConfig& rc, const std::string& negatives_path,
                   double ratio) {
    const CostModel cm = rc.cost_model();
    Flow flow = s.load_flow_files(in);
    Corpus in_task = s.load_corpus_file(in.corpus_path);
    Corpus out_task = s.load_corpus_file(negatives_path);
    Rng rng(rc.seed);
    auto [positives, negatives] = sample_mix(in_task, out_task, ratio, rng);
    EmbeddingTable table = s.resolve_embeddings(rc.embedder, flow.buckets, {&positives, &negatives});
    ScoringContext context(std::move(flow.buckets), std::move(table));
    const SeparationReport report = separation(flow.graph, positives, negatives, context, cm, rc.workers);
    s.emit(in.output_path, separation_json(report, provenance("separation", rc, {{"ratio", ratio}})));
    return 0;
}

int cmd_synth(Session& s, const RunConfig& rc, SynthesisConfig cfg, const std::string& topology,
              const std::string& out_dir, std::size_t negatives) {
    cfg.seed = rc.seed;
    cfg.topology = parse_topology(topology);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    SyntheticData data;
    std::optional<Corpus> out_task;
    if (negatives > 0) {
        SeparationScenario scenario = make_separation_scenario(cfg, negatives);
        data = std::move(scenario.in_task);
        out_task = std::move(scenario.out_task);
    } else {
        data = synthesize(cfg);
    }

    write_file(dir / "flow.json", serialize_flow(data.graph));
    write_file(dir / "buckets.json", serialize_buckets(data.buckets));
    write_file(dir / "corpus.jsonl", serialize_corpus(data.corpus));
    write_file(dir / "embeddings.jsonl", serialize_embeddings(data.table));
    if (out_task) {
        write_file(dir / "negatives.jsonl", serialize_corpus(*out_task));
    }
    ordered_json extra = {{"topology", topology},
                          {"depth", cfg.depth},
                          {"branching", cfg.branching},
                          {"n_buckets_user", cfg.n_buckets_user},
                          {"n_buckets_agent", cfg.n_buckets_agent},
                          {"n_dialogues", cfg.n_dialogues},
                          {"paraphrase_jitter", cfg.noise.paraphrase_jitter},
                          {"insert_prob", cfg.noise.insert_prob},
                          {"delete_prob", cfg.noise.delete_prob},
                          {"dominant_paths", cfg.dominant_paths},
                          {"dimension", cfg.dimension},
                          {"negatives", negatives}};
    write_file(dir / "provenance.json", ordered_json::parse(provenance("synth", rc, extra)).dump(2) + "\n");
    s.err() << "wrote " << data.graph.node_count() << " nodes, " << data.buckets.size() << " buckets, "
            << data.corpus.size() << " dialogues to " << out_dir << '\n';
    return 0;
}

int cmd_validate(Session& s, const Inputs& in, const RunConfig& rc, bool check_embeddings) {
    Flow flow = s.load_flow_files(in);
    std::optional<Corpus> corpus;
    if (!in.corpus_path.empty()) {
        corpus = s.load_corpus_file(in.corpus_path);
    }
    if (check_embeddings) {
        std::vector<const Corpus*> corpora;
        if (corpus) {
            corpora.push_back(&*corpus);
        }
        EmbeddingTable table = s.resolve_embeddings(rc.embedder, flow.buckets, corpora);
        ScoringContext context(std::move(flow.buckets), std::move(table));
    }
    const std::uint64_t paths = flow.graph.count_paths(kDefaultPathCap);
    ordered_json doc = {{"valid", true},
                        {"nodes", flow.graph.node_count()},
                        {"edges", flow.graph.edge_count()},
                        {"leaves", flow.graph.leaves().size()},
                        {"paths", paths > kDefaultPathCap ? ordered_json("> " + std::to_string(kDefaultPathCap))
                                                          : ordered_json(paths)}};
    if (corpus) {
        doc["dialogues"] = corpus->size();
        doc["total_utterances"] = corpus->total_utterances();
        doc["avg_length"] = corpus->avg_length();
    }
    s.emit(in.output_path, doc.dump(2) + "\n");
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Score dialogue flows against conversation corpora (FuDGE / FF1)", "fudge"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version()));

    RunConfig rc;
    Inputs in;
    std::string csv_path;
    std::string dialogue_id;
    std::string negatives_path;
    double ratio = 0.5;
    std::size_t max_k = 0;
    bool check_embeddings = false;
    SynthesisConfig synth;
    std::string topology = "layered";
    std::string out_dir;
    std::size_t synth_negatives = 0;

    auto* score = app.add_subcommand("score", "Per-dialogue FuDGE plus nc / nf / FF1");
    add_flow_inputs(score, in, true);
    add_run_options(score, rc, true);
    score->add_option("--format", rc.format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
    score->add_option("--csv", csv_path, "Also write the one-row metrics CSV here");

    auto* ff1_cmd = app.add_subcommand("ff1", "Metrics only (score without per-dialogue rows)");
    add_flow_inputs(ff1_cmd, in, true);
    add_run_options(ff1_cmd, rc, true);
    ff1_cmd->add_option("--format", rc.format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));

    auto* align = app.add_subcommand("align", "Best path and alignment trace for one dialogue");
    add_flow_inputs(align, in, true);
    add_run_options(align, rc, false);
    align->add_option("--dialogue", dialogue_id, "Dialogue id")->required();
    align->add_option("--format", rc.format, "table, json or csv")->check(CLI::IsMember({"json", "csv", "table"}));

    auto* sweep_cmd = app.add_subcommand("sweep", "nc / nf / FF1 over the top-k ranked paths");
    add_flow_inputs(sweep_cmd, in, true);
    add_run_options(sweep_cmd, rc, false);
    sweep_cmd->add_option("--max-k", max_k, "Stop after this many paths (0 = all)");
    sweep_cmd->add_option("--format", rc.format, "csv or json")->check(CLI::IsMember({"json", "csv"}));

    auto* sep = app.add_subcommand("separation", "In-task vs out-of-task FuDGE");
    add_flow_inputs(sep, in, true);
    add_run_options(sep, rc, false);
    sep->add_option("--negatives", negatives_path, "Out-of-task corpus (JSONL)")->required();
    sep->add_option("--ratio", ratio, "Fraction of in-task dialogues sampled")->capture_default_str();
    sep->add_option("--format", rc.format, "json")->check(CLI::IsMember({"json"}));

    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic flow / buckets / corpus / embeddings set");
    add_run_options(synth_cmd, rc, false);
    synth_cmd->add_option("--out-dir", out_dir, "Output directory")->required();
    synth_cmd->add_option("--topology", topology, "layered or fan")
        ->check(CLI::IsMember({"layered", "fan"}))
        ->capture_default_str();
    synth_cmd->add_option("--depth", synth.depth)->capture_default_str();
    synth_cmd->add_option("--branching", synth.branching)->capture_default_str();
    synth_cmd->add_option("--user-buckets", synth.n_buckets_user)->capture_default_str();
    synth_cmd->add_option("--agent-buckets", synth.n_buckets_agent)->capture_default_str();
    synth_cmd->add_option("--dialogues", synth.n_dialogues)->capture_default_str();
    synth_cmd->add_option("--jitter", synth.noise.paraphrase_jitter)->capture_default_str();
    synth_cmd->add_option("--insert-prob", synth.noise.insert_prob)->capture_default_str();
    synth_cmd->add_option("--delete-prob", synth.noise.delete_prob)->capture_default_str();
    synth_cmd->add_option("--dominant-paths", synth.dominant_paths)->capture_default_str();
    synth_cmd->add_option("--dimension", synth.dimension)->capture_default_str();
    synth_cmd->add_option("--negatives", synth_negatives, "Also write this many out-of-task dialogues");

    auto* validate = app.add_subcommand("validate", "Load and check input files");
    add_flow_inputs(validate, in, false);
    add_run_options(validate, rc, false);
    validate->add_option("--corpus", in.corpus_path, "Corpus file (JSONL)");
    validate->add_flag("--check-embeddings", check_embeddings, "Resolve every embedding the run would need");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    Session session(out, err);
    try {
        if (*score) {
            return cmd_score(session, in, rc, csv_path, false);
        }
        if (*ff1_cmd) {
            return cmd_score(session, in, rc, {}, true);
        }
        if (*align) {
            return cmd_align(session, in, rc, dialogue_id);
        }
        if (*sweep_cmd) {
            return cmd_sweep(session, in, rc, max_k);
        }
        if (*sep) {
            return cmd_separation(session, in, rc, negatives_path, ratio);
        }
        if (*synth_cmd) {
            return cmd_synth(session, rc, synth, topology, out_dir, synth_negatives);
        }
        if (*validate) {
            return cmd_validate(session, in, rc, check_embeddings);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

} // namespace fudge::cli
