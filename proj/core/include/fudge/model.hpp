#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fudge {

enum class Actor { User, Agent };

std::string_view to_string(Actor actor);
/// Accepts "user" / "agent" (case-insensitive); throws UnknownActor otherwise.
Actor parse_actor(std::string_view text);

struct Utterance {
    std::string id;
    std::string text;
    Actor actor = Actor::User;
};

struct Dialogue {
    std::string id;
    std::vector<Utterance> turns;

    std::size_t size() const noexcept { return turns.size(); }
};

/// Turn ids are derived from the dialogue id: "<dialogue_id>#<turn_index>".
std::string turn_id(std::string_view dialogue_id, std::size_t turn_index);

/// Ordered set of dialogues with unique ids.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Dialogue> dialogues);

    const std::vector<Dialogue>& dialogues() const noexcept { return dialogues_; }
    std::size_t size() const noexcept { return dialogues_.size(); }
    bool empty() const noexcept { return dialogues_.empty(); }

    std::size_t total_utterances() const noexcept { return total_utterances_; }
    /// Mean turns per dialogue; 0 for an empty corpus.
    double avg_length() const noexcept;

    const Dialogue& at(std::string_view dialogue_id) const;
    const Dialogue* find(std::string_view dialogue_id) const;

private:
    std::vector<Dialogue> dialogues_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t total_utterances_ = 0;
};

struct IntentBucket {
    std::string id;
    std::string name;
    Actor actor = Actor::User;
    /// Members carry the bucket's actor.
    std::vector<Utterance> utterances;
};

/// Buckets kept sorted by id so that iteration order (and tie-breaking on
/// bucket id) is stable.
class BucketSet {
public:
    BucketSet() = default;
    explicit BucketSet(std::vector<IntentBucket> buckets);

    std::span<const IntentBucket> buckets() const noexcept { return buckets_; }
    std::size_t size() const noexcept { return buckets_.size(); }
    const IntentBucket& operator[](std::size_t i) const { return buckets_[i]; }

    std::optional<std::size_t> index_of(std::string_view bucket_id) const;
    const IntentBucket& at(std::string_view bucket_id) const;

private:
    std::vector<IntentBucket> buckets_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct FlowNode {
    std::string id;
    /// Empty only for the root.
    std::optional<std::string> bucket_id;
};

struct FlowPath {
    std::vector<std::string> node_ids;

    /// Number of non-root nodes.
    std::size_t length() const noexcept { return node_ids.empty() ? 0 : node_ids.size() - 1; }
    friend bool operator==(const FlowPath&, const FlowPath&) = default;
    friend auto operator<=>(const FlowPath&, const FlowPath&) = default;
};

/// Rooted DAG of bucket-labelled nodes. Construction validates structure
/// (unique ids, known endpoints, no duplicate edges, root in-degree 0,
/// acyclic, every node reachable); bucket references are checked separately
/// by `check_bucket_refs`. Immutable afterwards.
class FlowGraph {
public:
    using Edge = std::pair<std::string, std::string>;

    FlowGraph() = default;
    FlowGraph(std::string root_id, std::vector<FlowNode> nodes, std::vector<Edge> edges);

    const std::string& root_id() const noexcept { return nodes_[root_].id; }
    std::size_t root() const noexcept { return root_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    const std::vector<FlowNode>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const FlowNode& node(std::size_t i) const { return nodes_[i]; }

    std::optional<std::size_t> index_of(std::string_view node_id) const;
    bool has_edge(std::size_t from, std::size_t to) const;

    /// Children / parents sorted by node id.
    std::span<const std::size_t> children(std::size_t i) const { return children_[i]; }
    std::span<const std::size_t> parents(std::size_t i) const { return parents_[i]; }
    bool is_leaf(std::size_t i) const { return children_[i].empty(); }

    /// Kahn order, ties broken by smallest node id.
    std::span<const std::size_t> topological_order() const noexcept { return topo_; }
    std::vector<std::size_t> leaves() const;

    /// Number of root-to-leaf paths, saturating at `cap + 1`.
    std::uint64_t count_paths(std::uint64_t cap) const;
    /// Shortest root-to-leaf path length in non-root nodes.
    std::size_t shortest_path_length() const;

private:
    std::vector<FlowNode> nodes_;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::size_t> topo_;
    std::size_t root_ = 0;
};

/// Throws DanglingBucketRef for any non-root node whose bucket is unknown.
void check_bucket_refs(const FlowGraph& graph, const BucketSet& buckets);

struct Flow {
    FlowGraph graph;
    BucketSet buckets;
};

inline constexpr std::uint64_t kDefaultPathCap = 1'000'000;

/// All root-to-leaf paths in lexicographic order of their node-id sequences.
/// Throws PathExplosion when there are more than `cap` of them.
std::vector<FlowPath> enumerate_paths(const FlowGraph& graph, std::uint64_t cap = kDefaultPathCap);

/// Throws InvalidPath unless `path` starts at the root, ends at a leaf and
/// follows edges of `graph`. Returns the node indices.
std::vector<std::size_t> resolve_path(const FlowGraph& graph, const FlowPath& path);

/// Sub-flow induced by the edges of `paths` (root always kept).
FlowGraph induced_subflow(const FlowGraph& graph, std::span<const FlowPath> paths);

} // namespace fudge
