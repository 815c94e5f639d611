#include <gtest/gtest.h>

#include <cmath>

#include "fudge/error.hpp"
#include "fudge/metrics.hpp"
#include "support/oracles.hpp"
#include "support/thrown.hpp"

using namespace fudge;
using namespace fudge::testing;

namespace {

double harmonic(double a, double b) { return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b); }

struct Scene {
    OneHotWorld world = one_hot_world("ABCD");
    std::vector<Dialogue> dialogues;

    void add(const std::string& symbols) {
        dialogues.push_back(symbol_dialogue(world, "d" + std::to_string(dialogues.size()), symbols));
    }
    ScoringContext context() const { return ScoringContext(world.buckets, world.table); }
    Corpus corpus() const { return Corpus(dialogues); }
};

} // namespace

TEST(MeanStd, Examples) {
    auto [m, s] = mean_std({1.0, 3.0});
    EXPECT_DOUBLE_EQ(m, 2.0);
    EXPECT_DOUBLE_EQ(s, 1.0);
    auto [m2, s2] = mean_std({0.7, 0.7, 0.7});
    EXPECT_DOUBLE_EQ(m2, 0.7);
    EXPECT_NEAR(s2, 0.0, 1e-15);
}

TEST(Complexity, CountsRoot) {
    EXPECT_EQ(complexity(symbol_chain("")), 1u);
    EXPECT_EQ(complexity(symbol_chain("ABC")), 4u);
    FlowGraph diamond("root", {{"root", std::nullopt}, {"a", "sA"}, {"b", "sB"}, {"c", "sC"}, {"d", "sD"}},
                      {{"root", "a"}, {"root", "b"}, {"a", "c"}, {"b", "c"}, {"c", "d"}});
    EXPECT_EQ(complexity(diamond), 5u);
}

TEST(Ff1, PrintedPairs) {
    // Reference values from the published table: (nc, nf) -> FF1.
    EXPECT_NEAR(ff1_from_normalized(0.44, 0.03), 0.71, 0.005);
    EXPECT_NEAR(ff1_from_normalized(0.23, 0.27), 0.75, 0.005);
}

TEST(Ff1, HarmonicMeanOfComplements) {
    EXPECT_DOUBLE_EQ(ff1_from_normalized(0.5, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(ff1_from_normalized(1.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(ff1_from_normalized(0.0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(ff1_from_normalized(1.0, 0.0), 0.0);
    for (double nc = 0.0; nc <= 1.0; nc += 0.125) {
        for (double nf = 0.0; nf <= 1.0; nf += 0.125) {
            EXPECT_NEAR(ff1_from_normalized(nc, nf), harmonic(1.0 - nc, 1.0 - nf), 1e-15);
        }
    }
}

TEST(Ff1, NormalizesByCorpusAndClamps) {
    Scene s;
    s.add("AB");
    s.add("ABCD");
    Corpus c = s.corpus();
    auto scores = ff1(1.5, 3, c);
    EXPECT_DOUBLE_EQ(scores.nc, 0.5);
    EXPECT_DOUBLE_EQ(scores.nf, 0.5);
    EXPECT_DOUBLE_EQ(scores.ff1, 0.5);
    auto clamped = ff1(100.0, 100, c);
    EXPECT_EQ(clamped.nc, 1.0);
    EXPECT_EQ(clamped.nf, 1.0);
    EXPECT_EQ(clamped.ff1, 0.0);
    EXPECT_EQ(thrown([] { ff1(1.0, 1, Corpus(std::vector<Dialogue>{})); }), ErrorKind::EmptyCorpus);
}

TEST(CorpusFudge, IdenticalDialoguesHaveZeroSpread) {
    Scene s;
    for (int i = 0; i < 4; ++i) {
        s.add("ABD");
    }
    ScoringContext ctx = s.context();
    FlowGraph chain = symbol_chain("ABC");
    auto score = corpus_fudge(s.corpus(), chain, ctx, CostModel{});
    EXPECT_EQ(score.per_dialogue.size(), 4u);
    EXPECT_DOUBLE_EQ(score.mean, efficient_fudge(s.dialogues[0], chain, ctx, CostModel{}));
    EXPECT_DOUBLE_EQ(score.std, 0.0);
}

TEST(CorpusFudge, MeanAndPopulationStd) {
    Scene s;
    s.add("ABD"); // one substitution
    s.add("DDD"); // three substitutions
    ScoringContext ctx = s.context();
    auto score = corpus_fudge(s.corpus(), symbol_chain("ABC"), ctx, CostModel{});
    EXPECT_EQ(score.per_dialogue[0].second, 1.0);
    EXPECT_EQ(score.per_dialogue[1].second, 3.0);
    EXPECT_DOUBLE_EQ(score.mean, 2.0);
    EXPECT_DOUBLE_EQ(score.std, 1.0);
}

TEST(CorpusFudge, EmptyCorpusIsAnError) {
    Scene s;
    ScoringContext ctx = s.context();
    EXPECT_EQ(thrown([&] { corpus_fudge(Corpus(std::vector<Dialogue>{}), symbol_chain("A"), ctx, CostModel{}); }), ErrorKind::EmptyCorpus);
}

TEST(CorpusFudge, WorkersAndAlgorithmsAgree) {
    SynthesisConfig cfg;
    cfg.seed = 11;
    cfg.n_dialogues = 37;
    cfg.noise = {0.2, 0.2, 0.2};
    auto data = synthesize(cfg);
    ScoringContext ctx(data.buckets, data.table);
    CostModel cm;
    auto one = corpus_fudge(data.corpus, data.graph, ctx, cm, 1);
    for (std::size_t workers : {2u, 3u, 8u, 64u}) {
        auto many = corpus_fudge(data.corpus, data.graph, ctx, cm, workers);
        EXPECT_EQ(many.per_dialogue, one.per_dialogue);
        EXPECT_EQ(many.mean, one.mean);
        EXPECT_EQ(many.std, one.std);
    }
    auto naive = corpus_fudge(data.corpus, data.graph, ctx, cm, 4, Algorithm::Naive);
    for (std::size_t i = 0; i < one.per_dialogue.size(); ++i) {
        EXPECT_NEAR(naive.per_dialogue[i].second, one.per_dialogue[i].second, 1e-9);
    }
}

TEST(EvaluateFlow, FillsEveryField) {
    Scene s;
    s.add("ABD");
    s.add("ABCC");
    s.add("A");
    ScoringContext ctx = s.context();
    FlowGraph chain = symbol_chain("ABC");
    auto r = evaluate_flow(s.corpus(), chain, ctx, CostModel{});
    EXPECT_EQ(r.dialogues, 3u);
    EXPECT_EQ(r.total_utterances, 8u);
    EXPECT_NEAR(r.avg_length, 8.0 / 3.0, 1e-15);
    EXPECT_EQ(r.complexity, 4u);
    // FuDGE per dialogue: 1 (substitution), 1 (insert), 2 (deletes).
    EXPECT_NEAR(r.mean_fudge, 4.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.nc, 0.5, 1e-15);
    EXPECT_NEAR(r.nf, 0.5, 1e-15);
    EXPECT_NEAR(r.ff1, 0.5, 1e-15);
    ASSERT_EQ(r.per_dialogue.size(), 3u);
    EXPECT_EQ(r.per_dialogue[2].first, "d2");
}
