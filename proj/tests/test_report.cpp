#include <gtest/gtest.h>

#include "json.hpp"

#include "fudge/error.hpp"
#include "fudge/report.hpp"
#include "support/oracles.hpp"
#include "support/thrown.hpp"

using namespace fudge;
using namespace fudge::testing;
using nlohmann::json;

namespace {

MetricReport sample_report() {
    MetricReport r;
    r.per_dialogue = {{"a", 1.0}, {"b", 3.0}};
    r.dialogues = 2;
    r.total_utterances = 8;
    r.avg_length = 4.0;
    r.mean_fudge = 2.0;
    r.std_fudge = 1.0;
    r.complexity = 4;
    r.nc = 0.5;
    r.nf = 0.5;
    r.ff1 = 0.5;
    return r;
}

} // namespace

TEST(Report, MetricJson) {
    json doc = json::parse(metric_report_json(sample_report(), "toy", R"({"tool":"fudge"})", true));
    EXPECT_EQ(doc["provenance"]["tool"], "fudge");
    EXPECT_EQ(doc["metrics"]["flow"], "toy");
    EXPECT_EQ(doc["metrics"]["ff1"], 0.5);
    EXPECT_EQ(doc["per_dialogue"][1]["fudge"], 3.0);
    json bare = json::parse(metric_report_json(sample_report(), "toy", "", false));
    EXPECT_FALSE(bare.contains("provenance"));
    EXPECT_FALSE(bare.contains("per_dialogue"));
    EXPECT_EQ(thrown([] { metric_report_json(sample_report(), "toy", "{oops", true); }), ErrorKind::Parse);
}

TEST(Report, MetricCsv) {
    EXPECT_EQ(metric_report_csv(sample_report(), "my,flow", ""),
              "flow,N,complexity,nc,mean_fudge,std_fudge,nf,ff1\n"
              "\"my,flow\",2,4,0.500000,2.000000,1.000000,0.500000,0.500000\n");
}

TEST(Report, AlignmentTableRows) {
    OneHotWorld world = one_hot_world("ABX");
    Dialogue d = symbol_dialogue(world, "d", "AXB");
    ScoringContext ctx(world.buckets, world.table);
    FlowGraph chain = symbol_chain("ABB");
    // Gaps (0.4 each) undercut a mismatch (1.0): X is inserted, one B deleted.
    auto trace = backtrace(d, chain, ctx, CostModel{0.5, 0.4, 0.4, DistanceVariant::Centroid});
    const std::string table = alignment_table(trace, d, chain, ctx.buckets());
    EXPECT_EQ(table.rfind("Conversation", 0), 0u);
    EXPECT_NE(table.find("u. symbol X"), std::string::npos);
    EXPECT_NE(table.find("| insert"), std::string::npos);
    EXPECT_NE(table.find("| delete"), std::string::npos);
    EXPECT_NE(table.find("total 0.800, path length 3"), std::string::npos);

    json doc = json::parse(alignment_json(trace, d, chain, ctx.buckets(), ""));
    EXPECT_NEAR(doc["total"].get<double>(), 0.8, 1e-12);
    EXPECT_EQ(doc["steps"].size(), trace.steps.size());
    EXPECT_TRUE(doc["steps"][1]["node"].is_null());
    EXPECT_EQ(doc["steps"][1]["operation"], "insert");

    const std::string csv = alignment_csv(trace, d, chain, ctx.buckets(), "");
    EXPECT_EQ(csv.rfind("conversation,intent,operation,node,step_cost,cumulative_cost\n", 0), 0u);
}

TEST(Report, SweepAndSeparation) {
    std::vector<SweepPoint> pts{{1, 3, 2.0, 0.25, 0.5, 0.6}, {2, 5, 1.0, 0.5, 0.25, 0.6}};
    EXPECT_EQ(sweep_csv(pts, ""), "k,nc,nf,ff1\n1,0.250000,0.500000,0.600000\n2,0.500000,0.250000,0.600000\n");
    json sj = json::parse(sweep_json(pts, ""));
    EXPECT_EQ(sj["sweep"][1]["complexity"], 5);

    SeparationReport r;
    r.positives = {1.0, 0.5, 10, 0.1};
    r.negatives = {3.0, 0.5, 10, 0.6};
    r.margin = 2.0;
    r.normalized_margin = 0.5;
    json doc = json::parse(separation_json(r, ""));
    for (const char* group : {"positives", "negatives"}) {
        for (const char* key : {"mean", "std", "n"}) {
            EXPECT_TRUE(doc[group].contains(key)) << group << "." << key;
        }
    }
    EXPECT_EQ(doc["margin"], 2.0);
}
