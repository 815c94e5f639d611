#include "fudge/align.hpp"

#include <algorithm>
#include <cmath>

#include "fudge/error.hpp"

namespace fudge {

void CostModel::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "alpha", "must lie in (0, 1]");
    }
    if (!(insert_cost > 0.0) || !std::isfinite(insert_cost)) {
        throw Error(ErrorKind::InvalidConfig, "insert_cost", "must be positive and finite");
    }
    if (!(delete_cost > 0.0) || !std::isfinite(delete_cost)) {
        throw Error(ErrorKind::InvalidConfig, "delete_cost", "must be positive and finite");
    }
}

double substitution_cost(std::size_t bucket, const Utterance& u, const ScoringContext& context, const CostModel& cm) {
    const double d1 = context.intent_utterance_distance(bucket, u, cm.variant);
    if (!std::isfinite(d1)) {
        return kInfinity;
    }
    const std::size_t nearest = context.nearest_bucket(u, cm.variant);
    return cm.alpha * (d1 + context.intent_intent_distance(bucket, nearest));
}

// ---------------------------------------------------------------------------
// SubstitutionTable

SubstitutionTable::SubstitutionTable(const Dialogue& dialogue, const FlowGraph& graph,
                                     const ScoringContext& context, const CostModel& cm)
    : turns_(dialogue.size()) {
    const BucketSet& buckets = context.buckets();

    // Row 0 is reserved for the root and stays +inf.
    std::vector<std::size_t> bucket_row(buckets.size(), 0);
    std::vector<std::size_t> row_bucket{buckets.size()};
    node_row_.assign(graph.node_count(), 0);
    for (std::size_t v = 0; v < graph.node_count(); ++v) {
        const auto& bucket_id = graph.node(v).bucket_id;
        if (!bucket_id) {
            continue;
        }
        auto b = buckets.index_of(*bucket_id);
        if (!b) {
            throw Error(ErrorKind::DanglingBucketRef, graph.node(v).id, "unknown bucket " + *bucket_id);
        }
        if (bucket_row[*b] == 0) {
            bucket_row[*b] = row_bucket.size();
            row_bucket.push_back(*b);
        }
        node_row_[v] = bucket_row[*b];
    }

    costs_.assign(row_bucket.size() * turns_, kInfinity);
    std::vector<double> d1(buckets.size());
    for (std::size_t t = 0; t < turns_; ++t) {
        const Utterance& u = dialogue.turns[t];
        bool needed = false;
        for (std::size_t r = 1; r < row_bucket.size(); ++r) {
            needed = needed || buckets[row_bucket[r]].actor == u.actor;
        }
        if (!needed) {
            continue;
        }
        // B*: same-actor argmin of d1, smallest bucket id on ties.
        std::size_t nearest = buckets.size();
        for (std::size_t b = 0; b < buckets.size(); ++b) {
            if (buckets[b].actor != u.actor) {
                d1[b] = kInfinity;
                continue;
            }
            d1[b] = context.intent_utterance_distance(b, u, cm.variant);
            if (nearest == buckets.size() || d1[b] < d1[nearest]) {
                nearest = b;
            }
        }
        for (std::size_t r = 1; r < row_bucket.size(); ++r) {
            const std::size_t b = row_bucket[r];
            if (buckets[b].actor != u.actor) {
                continue;
            }
            costs_[r * turns_ + t] = cm.alpha * (d1[b] + context.intent_intent_distance(b, nearest));
        }
    }
}

// ---------------------------------------------------------------------------
// DP kernels

namespace {

/// Fills `out` with one DP step: `prev` is the row of the predecessor prefix.
void advance_row(const double* prev, double* out, std::size_t node, const SubstitutionTable& costs,
                 const CostModel& cm) {
    const std::size_t m = costs.turns();
    out[0] = prev[0] + cm.delete_cost;
    for (std::size_t j = 1; j <= m; ++j) {
        double best = prev[j] + cm.delete_cost;
        best = std::min(best, out[j - 1] + cm.insert_cost);
        best = std::min(best, prev[j - 1] + costs.cost(node, j - 1));
        out[j] = best;
    }
}

void root_row(double* out, std::size_t m, const CostModel& cm) {
    out[0] = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
        out[j] = out[j - 1] + cm.insert_cost;
    }
}

/// Per-node rows of the whole DAG. `merged` / `from` record, per cell, the
/// pointwise parent minimum and the parent that achieved it.
struct DagTable {
    std::size_t width = 0;
    std::vector<double> rows;
    std::vector<double> merged;
    std::vector<std::size_t> from;

    const double* row(std::size_t v) const { return rows.data() + v * width; }
};

DagTable fill_dag(const FlowGraph& graph, const SubstitutionTable& costs, const CostModel& cm, bool keep_parents) {
    DagTable t;
    t.width = costs.turns() + 1;
    const std::size_t n = graph.node_count();
    t.rows.assign(n * t.width, kInfinity);
    if (keep_parents) {
        t.merged.assign(n * t.width, kInfinity);
        t.from.assign(n * t.width, n);
    }
    std::vector<double> scratch(t.width);

    for (std::size_t v : graph.topological_order()) {
        double* out = t.rows.data() + v * t.width;
        if (v == graph.root()) {
            root_row(out, costs.turns(), cm);
            continue;
        }
        double* merged = keep_parents ? t.merged.data() + v * t.width : scratch.data();
        std::fill(merged, merged + t.width, kInfinity);
        for (std::size_t p : graph.parents(v)) {
            const double* pr = t.row(p);
            for (std::size_t j = 0; j < t.width; ++j) {
                // Parents are sorted by id: strict < keeps the smaller id on ties.
                if (pr[j] < merged[j]) {
                    merged[j] = pr[j];
                    if (keep_parents) {
                        t.from[v * t.width + j] = p;
                    }
                }
            }
        }
        advance_row(merged, out, v, costs, cm);
    }
    return t;
}

} // namespace

PathDistance path_edit_distance(const Dialogue& dialogue, const FlowGraph& graph, const FlowPath& path,
                                const SubstitutionTable& costs, const CostModel& cm) {
    const auto nodes = resolve_path(graph, path);
    const std::size_t m = dialogue.size();
    PathDistance out;
    out.rows.reserve(nodes.size());
    DistanceRow first{graph.node(nodes.front()).id, std::vector<double>(m + 1)};
    root_row(first.values.data(), m, cm);
    out.rows.push_back(std::move(first));
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        DistanceRow next{graph.node(nodes[k]).id, std::vector<double>(m + 1)};
        advance_row(out.rows.back().values.data(), next.values.data(), nodes[k], costs, cm);
        out.rows.push_back(std::move(next));
    }
    out.total = out.rows.back().values[m];
    return out;
}

PathDistance path_edit_distance(const Dialogue& dialogue, const FlowGraph& graph, const FlowPath& path,
                                const ScoringContext& context, const CostModel& cm) {
    cm.validate();
    SubstitutionTable costs(dialogue, graph, context, cm);
    return path_edit_distance(dialogue, graph, path, costs, cm);
}

double naive_fudge(const Dialogue& dialogue, const FlowGraph& graph, const ScoringContext& context,
                   const CostModel& cm, std::uint64_t path_cap) {
    cm.validate();
    const auto paths = enumerate_paths(graph, path_cap);
    SubstitutionTable costs(dialogue, graph, context, cm);
    double min_dist = kInfinity;
    for (const FlowPath& p : paths) {
        min_dist = std::min(min_dist, path_edit_distance(dialogue, graph, p, costs, cm).total);
    }
    return min_dist;
}

double efficient_fudge([[maybe_unused]] const Dialogue& dialogue, const FlowGraph& graph,
                       const SubstitutionTable& costs, const CostModel& cm) {
    const DagTable t = fill_dag(graph, costs, cm, false);
    double best = kInfinity;
    for (std::size_t leaf : graph.leaves()) {
        best = std::min(best, t.row(leaf)[costs.turns()]);
    }
    return best;
}

double efficient_fudge(const Dialogue& dialogue, const FlowGraph& graph, const ScoringContext& context,
                       const CostModel& cm) {
    cm.validate();
    SubstitutionTable costs(dialogue, graph, context, cm);
    return efficient_fudge(dialogue, graph, costs, cm);
}

// ---------------------------------------------------------------------------
// backtrace

std::string_view to_string(AlignOp op) {
    switch (op) {
    case AlignOp::MatchSubstitute: return "replace";
    case AlignOp::Insert: return "insert";
    case AlignOp::Delete: return "delete";
    }
    return "?";
}

AlignmentTrace backtrace(const Dialogue& dialogue, const FlowGraph& graph, const ScoringContext& context,
                         const CostModel& cm) {
    cm.validate();
    SubstitutionTable costs(dialogue, graph, context, cm);
    const DagTable t = fill_dag(graph, costs, cm, true);
    const std::size_t m = costs.turns();
    const std::size_t w = t.width;

    std::size_t v = graph.root();
    double best = kInfinity;
    for (std::size_t leaf : graph.leaves()) {
        if (t.row(leaf)[m] < best) {
            best = t.row(leaf)[m];
            v = leaf;
        }
    }

    std::vector<AlignmentStep> reversed;
    std::vector<std::size_t> path_nodes{v};
    std::size_t j = m;
    while (v != graph.root() || j > 0) {
        if (v == graph.root()) {
            reversed.push_back({AlignOp::Insert, std::nullopt, j - 1, cm.insert_cost, 0.0});
            --j;
            continue;
        }
        const double value = t.row(v)[j];
        const double* merged = t.merged.data() + v * w;
        const std::string& id = graph.node(v).id;
        if (j > 0 && merged[j - 1] + costs.cost(v, j - 1) == value) {
            reversed.push_back({AlignOp::MatchSubstitute, id, j - 1, costs.cost(v, j - 1), 0.0});
            v = t.from[v * w + j - 1];
            --j;
            path_nodes.push_back(v);
        } else if (merged[j] + cm.delete_cost == value) {
            reversed.push_back({AlignOp::Delete, id, std::nullopt, cm.delete_cost, 0.0});
            v = t.from[v * w + j];
            path_nodes.push_back(v);
        } else {
            reversed.push_back({AlignOp::Insert, std::nullopt, j - 1, cm.insert_cost, 0.0});
            --j;
        }
    }

    AlignmentTrace trace;
    trace.steps.assign(reversed.rbegin(), reversed.rend());
    double cumulative = 0.0;
    for (AlignmentStep& s : trace.steps) {
        cumulative += s.step_cost;
        s.cumulative_cost = cumulative;
    }
    trace.total = cumulative;
    for (auto it = path_nodes.rbegin(); it != path_nodes.rend(); ++it) {
        trace.best_path.node_ids.push_back(graph.node(*it).id);
    }
    return trace;
}

} // namespace fudge
