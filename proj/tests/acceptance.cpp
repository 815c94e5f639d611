// Acceptance suite: one PASS/FAIL line per criterion.
//
//   fudge_acceptance                      run every criterion
//   fudge_acceptance --criterion NAME     run one (exit 1 if it fails)
//   fudge_acceptance --list

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fudge/align.hpp"
#include "fudge/experiments.hpp"
#include "fudge/metrics.hpp"
#include "support/oracles.hpp"

using namespace fudge;
using namespace fudge::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------------------

constexpr std::size_t kOracleInstances = 1000;
constexpr double kOracleTolerance = 1e-9;
constexpr double kOracleBudget = 30.0;

Outcome oracle_equivalence() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::size_t evaluations = 0;
    for (std::uint64_t seed = 0; seed < kOracleInstances; ++seed) {
        auto inst = random_instance(seed);
        ScoringContext ctx(inst.buckets, inst.table);
        for (DistanceVariant variant : {DistanceVariant::Min, DistanceVariant::Centroid}) {
            CostModel cm{0.5, 1.0, 1.0, variant};
            const double e = efficient_fudge(inst.dialogue, inst.graph, ctx, cm);
            const double n = naive_fudge(inst.dialogue, inst.graph, ctx, cm);
            worst = std::max(worst, std::abs(e - n));
            ++evaluations;
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= kOracleTolerance && secs < kOracleBudget,
            fmt("max |efficient - naive| = %.3g over %zu evaluations (tol %.0e), %.2f s (budget %.0f s)", worst,
                evaluations, kOracleTolerance, secs, kOracleBudget)};
}

Outcome actor_gate() {
    const auto t0 = Clock::now();
    std::size_t steps = 0;
    std::size_t violations = 0;
    for (std::uint64_t seed = 0; seed < kOracleInstances; ++seed) {
        auto inst = random_instance(seed);
        ScoringContext ctx(inst.buckets, inst.table);
        for (DistanceVariant variant : {DistanceVariant::Min, DistanceVariant::Centroid}) {
            auto trace = backtrace(inst.dialogue, inst.graph, ctx, CostModel{0.5, 1.0, 1.0, variant});
            for (const AlignmentStep& s : trace.steps) {
                if (s.op != AlignOp::MatchSubstitute) {
                    continue;
                }
                ++steps;
                const FlowNode& node = inst.graph.node(*inst.graph.index_of(*s.node_id));
                if (inst.buckets.at(*node.bucket_id).actor != inst.dialogue.turns[*s.turn_index].actor) {
                    ++violations;
                }
            }
        }
    }
    return {violations == 0, fmt("%zu cross-actor substitutions among %zu substitution steps, %.2f s", violations,
                                 steps, seconds_since(t0))};
}

constexpr std::size_t kLevenshteinPairs = 500;

Outcome levenshtein_reduction() {
    const auto t0 = Clock::now();
    Rng rng(20240501);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < kLevenshteinPairs; ++i) {
        const std::size_t sigma = rng.between(1, 10);
        std::string alphabet;
        for (std::size_t c = 0; c < sigma; ++c) {
            alphabet += static_cast<char>('a' + c);
        }
        auto draw = [&] {
            std::string s;
            const std::size_t len = rng.between(0, 15);
            for (std::size_t k = 0; k < len; ++k) {
                s += alphabet[rng.index(sigma)];
            }
            return s;
        };
        const std::string path_symbols = draw();
        const std::string dialogue_symbols = draw();

        OneHotWorld world = one_hot_world(alphabet);
        Dialogue d = symbol_dialogue(world, "d", dialogue_symbols);
        ScoringContext ctx(world.buckets, world.table);
        FlowGraph chain = symbol_chain(path_symbols);
        const double got = path_edit_distance(d, chain, enumerate_paths(chain).front(), ctx, CostModel{}).total;
        if (got != static_cast<double>(levenshtein(path_symbols, dialogue_symbols))) {
            ++mismatches;
        }
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 5.0,
            fmt("%zu / %zu pairs differ from unit-cost edit distance, %.2f s (budget 5 s)", mismatches,
                kLevenshteinPairs, secs)};
}

// Published (FF1, FuDGE, Complexity) triples. Complexity is printed once per
// algorithm block and shared by its Min and Centroid rows.
struct PrintedCell {
    const char* label;
    double ff1;
    double nf;
    double nc;
};

constexpr PrintedCell kPrintedCells[] = {
    {"STAR sup ALG1-Min", 0.59, 0.08, 0.57},        {"STAR sup ALG1-Centroid", 0.58, 0.12, 0.57},
    {"STAR unsup ALG1-Min", 0.73, 0.26, 0.28},      {"STAR unsup ALG1-Centroid", 0.71, 0.34, 0.28},
    {"Finance sup ALG1-Min", 0.71, 0.03, 0.44},     {"Finance sup ALG1-Centroid", 0.71, 0.03, 0.44},
    {"Finance unsup ALG1-Min", 0.03, 0.03, 0.99},   {"Finance unsup ALG1-Centroid", 0.03, 0.09, 0.99},
    {"STAR sup ALG2-Min", 0.75, 0.27, 0.23},        {"STAR sup ALG2-Centroid", 0.71, 0.35, 0.23},
    {"STAR unsup ALG2-Min", 0.79, 0.24, 0.18},      {"STAR unsup ALG2-Centroid", 0.73, 0.34, 0.18},
    {"Finance sup ALG2-Min", 0.81, 0.21, 0.18},     {"Finance sup ALG2-Centroid", 0.77, 0.27, 0.18},
    {"Finance unsup ALG2-Min", 0.67, 0.23, 0.41},   {"Finance unsup ALG2-Centroid", 0.65, 0.27, 0.41},
};
constexpr double kPrintedTolerance = 0.01;

Outcome ff1_printed_table() {
    std::size_t ok = 0;
    std::string misses;
    for (const PrintedCell& c : kPrintedCells) {
        const double got = ff1_from_normalized(c.nc, c.nf);
        if (std::abs(got - c.ff1) <= kPrintedTolerance) {
            ++ok;
        } else {
            misses += fmt("; %s: nc %.2f nf %.2f -> %.4f vs printed %.2f", c.label, c.nc, c.nf, got, c.ff1);
        }
    }
    const std::size_t total = std::size(kPrintedCells);
    return {ok == total, fmt("%zu / %zu cells within +-%.2f", ok, total, kPrintedTolerance) + misses};
}

constexpr std::size_t kMonotoneTriples = 200;

Outcome path_addition_monotonicity() {
    const auto t0 = Clock::now();
    std::size_t checked = 0;
    std::size_t violations = 0;
    for (std::uint64_t seed = 0; checked < kMonotoneTriples; ++seed) {
        auto inst = random_instance(7'000'000 + seed);
        const FlowGraph& g = inst.graph;
        if (g.node_count() < 2) {
            continue;
        }
        Rng rng(seed);
        // Branch off a non-leaf node so no existing path is cut short.
        std::vector<std::size_t> inner;
        for (std::size_t v = 0; v < g.node_count(); ++v) {
            if (!g.is_leaf(v)) {
                inner.push_back(v);
            }
        }
        const std::size_t from = inner[rng.index(inner.size())];
        std::vector<FlowNode> nodes = g.nodes();
        std::vector<FlowGraph::Edge> edges = g.edges();
        std::string prev = g.node(from).id;
        const std::size_t extra = rng.between(1, 5);
        for (std::size_t k = 0; k < extra; ++k) {
            const std::string id = "x" + std::to_string(k);
            nodes.push_back({id, inst.buckets[rng.index(inst.buckets.size())].id});
            edges.emplace_back(prev, id);
            prev = id;
        }
        // Half the time rejoin a node that comes later in index order, which
        // keeps the graph acyclic (random instances only have forward edges).
        if (rng.chance(0.5) && from + 1 < g.node_count()) {
            const std::size_t to = rng.between(from + 1, g.node_count() - 1);
            edges.emplace_back(prev, g.node(to).id);
        }
        FlowGraph bigger(g.root_id(), std::move(nodes), std::move(edges));

        ScoringContext ctx(inst.buckets, inst.table);
        const CostModel cm{0.5, 1.0, 1.0, seed % 2 ? DistanceVariant::Min : DistanceVariant::Centroid};
        const double before = efficient_fudge(inst.dialogue, g, ctx, cm);
        const double after = efficient_fudge(inst.dialogue, bigger, ctx, cm);
        if (after > before) {
            ++violations;
        }
        ++checked;
    }
    const double secs = seconds_since(t0);
    return {violations == 0 && secs < 10.0,
            fmt("%zu / %zu triples where the extra path raised FuDGE, %.2f s (budget 10 s)", violations, checked, secs)};
}

constexpr std::size_t kSeparationSeeds = 20;
constexpr double kSeparationNoise = 0.1;
constexpr double kSeparationMargin = 0.15;

Outcome separation_panel() {
    const auto t0 = Clock::now();
    double margin_sum = 0.0;
    std::size_t ordered = 0;
    double worst = kInfinity;
    for (std::uint64_t seed = 1; seed <= kSeparationSeeds; ++seed) {
        SynthesisConfig cfg;
        cfg.seed = seed;
        cfg.noise = {kSeparationNoise, kSeparationNoise, kSeparationNoise};
        auto scenario = make_separation_scenario(cfg);
        Rng rng(seed);
        auto [positives, negatives] = sample_mix(scenario.in_task.corpus, scenario.out_task, 0.5, rng);
        ScoringContext ctx(scenario.in_task.buckets, scenario.in_task.table);
        auto r = separation(scenario.in_task.graph, positives, negatives, ctx, CostModel{});
        ordered += r.positives.mean < r.negatives.mean;
        margin_sum += r.normalized_margin;
        worst = std::min(worst, r.normalized_margin);
    }
    const double mean_margin = margin_sum / static_cast<double>(kSeparationSeeds);
    const double secs = seconds_since(t0);
    return {ordered == kSeparationSeeds && mean_margin > kSeparationMargin && secs < 60.0,
            fmt("positives < negatives on %zu / %zu seeds; mean per-turn margin %.4f (need > %.2f, min %.4f), "
                "%.2f s (budget 60 s)",
                ordered, kSeparationSeeds, mean_margin, kSeparationMargin, worst, secs)};
}

constexpr std::uint64_t kSweepSeeds[] = {1, 2, 3, 4, 5};

Outcome sweep_shape() {
    const auto t0 = Clock::now();
    std::string detail;
    bool pass = true;
    for (std::uint64_t seed : kSweepSeeds) {
        SynthesisConfig cfg;
        cfg.seed = seed;
        cfg.topology = Topology::Fan;
        cfg.branching = 10;
        cfg.depth = 6;
        cfg.dominant_paths = 2;
        cfg.n_dialogues = 40;
        cfg.noise = {0.1, 0.1, 0.1};
        auto data = synthesize(cfg);
        ScoringContext ctx(data.buckets, data.table);
        auto points = sweep(data.graph, data.corpus, ctx, CostModel{});
        const std::size_t K = points.size();

        bool monotone = K == 10;
        for (std::size_t i = 1; i < K; ++i) {
            monotone = monotone && points[i].nc >= points[i - 1].nc && points[i].nf <= points[i - 1].nf;
        }
        // Brute force over every k: first k with the highest FF1.
        std::size_t best = 0;
        for (std::size_t i = 1; i < K; ++i) {
            if (points[i].ff1 > points[best].ff1) {
                best = i;
            }
        }
        const std::size_t k_star = points[best].k;
        const bool ok = monotone && k_star >= 2 && k_star < K;
        pass = pass && ok;
        detail += fmt("%sseed %llu: K=%zu monotone=%s k*=%zu", detail.empty() ? "" : "; ",
                      static_cast<unsigned long long>(seed), K, monotone ? "yes" : "no", k_star);
    }
    const double secs = seconds_since(t0);
    return {pass && secs < 30.0, detail + fmt("; %.2f s (budget 30 s)", secs)};
}

// Layered DAG with `layers` layers of width 2, consecutive layers fully
// connected; one bucket (two hashed utterances) per node.
struct ScalingCase {
    FlowGraph graph;
    std::unique_ptr<ScoringContext> context;
    Dialogue dialogue;
};

ScalingCase scaling_case(std::size_t layers, std::size_t turns) {
    Rng rng(99);
    std::vector<IntentBucket> buckets;
    std::vector<FlowNode> nodes{{"root", std::nullopt}};
    std::vector<FlowGraph::Edge> edges;
    std::vector<std::string> prev{"root"};
    EmbeddingTable table(kDefaultHashDimension);
    for (std::size_t layer = 0; layer < layers; ++layer) {
        std::vector<std::string> cur;
        const Actor actor = layer % 2 ? Actor::Agent : Actor::User;
        for (std::size_t k = 0; k < 2; ++k) {
            const std::string id = "n" + std::to_string(layer) + "_" + std::to_string(k);
            IntentBucket b{"b" + id, id, actor, {}};
            for (std::size_t u = 0; u < 2; ++u) {
                const std::string uid = b.id + "." + std::to_string(u);
                b.utterances.push_back({uid, "intent " + id + " phrasing " + std::to_string(u), actor});
                table.insert(uid, hash_embed(b.utterances.back().text, table.dimension()));
            }
            buckets.push_back(std::move(b));
            nodes.push_back({id, "b" + id});
            for (const std::string& p : prev) {
                edges.emplace_back(p, id);
            }
            cur.push_back(id);
        }
        prev = std::move(cur);
    }
    Dialogue d{"scale", {}};
    for (std::size_t t = 0; t < turns; ++t) {
        const std::size_t layer = rng.index(layers);
        Utterance u{turn_id(d.id, t), "intent n" + std::to_string(layer) + "_0 said " + std::to_string(t),
                    layer % 2 ? Actor::Agent : Actor::User};
        table.insert(u.id, hash_embed(u.text, table.dimension()));
        d.turns.push_back(std::move(u));
    }
    FlowGraph g("root", std::move(nodes), std::move(edges));
    return {std::move(g), std::make_unique<ScoringContext>(BucketSet(std::move(buckets)), std::move(table)),
            std::move(d)};
}

double best_time(const ScalingCase& c, int reps) {
    double best = kInfinity;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        volatile double v = efficient_fudge(c.dialogue, c.graph, *c.context, CostModel{});
        (void)v;
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

Outcome complexity_scaling() {
    ScalingCase small = scaling_case(500, 50);
    ScalingCase large = scaling_case(1000, 50);
    const double t_small = best_time(small, 7);
    const double t_large = best_time(large, 7);
    const double ratio = t_large / t_small;
    return {t_small < 1.0 && ratio >= 1.5 && ratio <= 3.0,
            fmt("|V|=%zu |E|=%zu: %.4f s (budget 1 s); |V|=%zu |E|=%zu: %.4f s; ratio %.2f (need 1.5-3.0)",
                small.graph.node_count(), small.graph.edge_count(), t_small, large.graph.node_count(),
                large.graph.edge_count(), t_large, ratio)};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {"oracle_equivalence", oracle_equivalence},
    {"levenshtein_reduction", levenshtein_reduction},
    {"ff1_printed_table", ff1_printed_table},
    {"path_addition_monotonicity", path_addition_monotonicity},
    {"actor_gate", actor_gate},
    {"separation", separation_panel},
    {"sweep_shape", sweep_shape},
    {"complexity_scaling", complexity_scaling},
};

} // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--list") {
            for (const auto& [name, fn] : kCriteria) {
                std::printf("%s\n", name.c_str());
            }
            return 0;
        }
        if (arg == "--criterion" && i + 1 < argc) {
            only = argv[++i];
        } else {
            std::fprintf(stderr, "usage: %s [--list] [--criterion NAME]\n", argv[0]);
            return 2;
        }
    }

    bool all_pass = true;
    bool ran = false;
    for (const auto& [name, fn] : kCriteria) {
        if (!only.empty() && name != only) {
            continue;
        }
        ran = true;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    }
    if (!ran) {
        std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
        return 2;
    }
    return all_pass ? 0 : 1;
}
