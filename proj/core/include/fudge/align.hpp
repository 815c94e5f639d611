#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fudge/embedding.hpp"
#include "fudge/model.hpp"

namespace fudge {

struct CostModel {
    double alpha = 0.5;
    double insert_cost = 1.0; // per dialogue turn left unmatched
    double delete_cost = 1.0; // per path node left unmatched
    DistanceVariant variant = DistanceVariant::Centroid;

    /// Throws InvalidConfig unless alpha in (0,1] and both gap costs > 0.
    void validate() const;
};

/// c_sub(B, u) = alpha * (d1(B, u) + d2(B, B*(u))); +inf across actors.
double substitution_cost(std::size_t bucket, const Utterance& u, const ScoringContext& context, const CostModel& cm);

/// Substitution costs of one dialogue against every bucket the flow uses,
/// indexed by (flow node, turn). B* is resolved once per turn.
class SubstitutionTable {
public:
    SubstitutionTable(const Dialogue& dialogue, const FlowGraph& graph, const ScoringContext& context,
                      const CostModel& cm);

    std::size_t turns() const noexcept { return turns_; }
    /// Cost of substituting turn `turn` (0-based) with flow node `node`.
    /// The root has no bucket; asking for it is a logic error.
    double cost(std::size_t node, std::size_t turn) const { return costs_[node_row_[node] * turns_ + turn]; }

private:
    std::size_t turns_;
    std::vector<std::size_t> node_row_;
    std::vector<double> costs_;
};

/// One row of the edit-distance table: entry j is the cheapest alignment of
/// the path prefix ending at a node with the first j turns.
struct DistanceRow {
    std::string node_id;
    std::vector<double> values;
};

struct PathDistance {
    double total = 0.0;
    /// One row per path node, root first.
    std::vector<DistanceRow> rows;
};

/// Weighted Levenshtein DP between a dialogue and one root-to-leaf path.
PathDistance path_edit_distance(const Dialogue& dialogue, const FlowGraph& graph, const FlowPath& path,
                                const ScoringContext& context, const CostModel& cm);
PathDistance path_edit_distance(const Dialogue& dialogue, const FlowGraph& graph, const FlowPath& path,
                                const SubstitutionTable& costs, const CostModel& cm);

/// Minimum of path_edit_distance over every enumerated path.
/// Throws PathExplosion when the flow has more than `path_cap` paths.
double naive_fudge(const Dialogue& dialogue, const FlowGraph& graph, const ScoringContext& context,
                   const CostModel& cm, std::uint64_t path_cap = kDefaultPathCap);

/// Same value as naive_fudge in O((|V| + |E|) * m): one row per node, filled
/// in topological order from the pointwise minimum of the parent rows.
double efficient_fudge(const Dialogue& dialogue, const FlowGraph& graph, const ScoringContext& context,
                       const CostModel& cm);
double efficient_fudge(const Dialogue& dialogue, const FlowGraph& graph, const SubstitutionTable& costs,
                       const CostModel& cm);

enum class AlignOp { MatchSubstitute, Insert, Delete };

std::string_view to_string(AlignOp op);

struct AlignmentStep {
    AlignOp op = AlignOp::MatchSubstitute;
    std::optional<std::string> node_id;    // absent for Insert
    std::optional<std::size_t> turn_index; // absent for Delete
    double step_cost = 0.0;
    double cumulative_cost = 0.0;
};

struct AlignmentTrace {
    std::vector<AlignmentStep> steps;
    FlowPath best_path;
    double total = 0.0;
    std::size_t path_length() const noexcept { return best_path.length(); }
};

/// Best path and operation sequence. Ties prefer substitute, then delete,
/// then insert, then the parent / leaf with the smaller node id.
AlignmentTrace backtrace(const Dialogue& dialogue, const FlowGraph& graph, const ScoringContext& context,
                         const CostModel& cm);

} // namespace fudge
