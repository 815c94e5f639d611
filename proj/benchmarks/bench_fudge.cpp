#include <benchmark/benchmark.h>

#include "fudge/align.hpp"
#include "fudge/experiments.hpp"
#include "fudge/metrics.hpp"

namespace {

struct Fixture {
    fudge::SyntheticData data;
    fudge::ScoringContext context;

    explicit Fixture(fudge::SyntheticData d)
        : data(std::move(d)), context(data.buckets, data.table) {}
};

fudge::SyntheticData layered(std::size_t depth, std::size_t dialogues) {
    fudge::SynthesisConfig cfg;
    cfg.seed = 7;
    cfg.depth = depth;
    cfg.branching = 2;
    cfg.n_dialogues = dialogues;
    cfg.noise = {0.1, 0.1, 0.1};
    return fudge::synthesize(cfg);
}

void BM_Efficient(benchmark::State& state) {
    Fixture f(layered(static_cast<std::size_t>(state.range(0)), 4));
    const auto& d = f.data.corpus.dialogues().front();
    for (auto _ : state) {
        benchmark::DoNotOptimize(fudge::efficient_fudge(d, f.data.graph, f.context, fudge::CostModel{}));
    }
    state.counters["nodes"] = static_cast<double>(f.data.graph.node_count());
    state.counters["edges"] = static_cast<double>(f.data.graph.edge_count());
    state.counters["turns"] = static_cast<double>(d.size());
}
BENCHMARK(BM_Efficient)->RangeMultiplier(2)->Range(8, 512);

void BM_Naive(benchmark::State& state) {
    Fixture f(layered(static_cast<std::size_t>(state.range(0)), 4));
    const auto& d = f.data.corpus.dialogues().front();
    for (auto _ : state) {
        benchmark::DoNotOptimize(fudge::naive_fudge(d, f.data.graph, f.context, fudge::CostModel{}));
    }
    state.counters["paths"] = static_cast<double>(f.data.graph.count_paths(fudge::kDefaultPathCap));
}
BENCHMARK(BM_Naive)->DenseRange(4, 16, 4);

void BM_CorpusWorkers(benchmark::State& state) {
    Fixture f(layered(64, 200));
    const auto workers = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fudge::corpus_fudge(f.data.corpus, f.data.graph, f.context, fudge::CostModel{}, workers).mean);
    }
}
BENCHMARK(BM_CorpusWorkers)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();

} // namespace

BENCHMARK_MAIN();
