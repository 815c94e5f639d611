#include "fudge/model.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <queue>
#include <set>

#include "fudge/error.hpp"

namespace fudge {

namespace {

bool blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

} // namespace

std::string_view to_string(Actor actor) { return actor == Actor::User ? "user" : "agent"; }

Actor parse_actor(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "user") {
        return Actor::User;
    }
    if (lower == "agent") {
        return Actor::Agent;
    }
    throw Error(ErrorKind::UnknownActor, std::string(text));
}

std::string turn_id(std::string_view dialogue_id, std::size_t turn_index) {
    std::string id(dialogue_id);
    id += '#';
    id += std::to_string(turn_index);
    return id;
}

// ---------------------------------------------------------------------------
// Corpus

Corpus::Corpus(std::vector<Dialogue> dialogues) : dialogues_(std::move(dialogues)) {
    std::unordered_map<std::string_view, std::string_view> seen_turns;
    for (std::size_t i = 0; i < dialogues_.size(); ++i) {
        const Dialogue& d = dialogues_[i];
        if (!index_.emplace(d.id, i).second) {
            throw Error(ErrorKind::DuplicateDialogueId, d.id);
        }
        for (const Utterance& u : d.turns) {
            if (u.text.empty() || blank(u.text)) {
                throw Error(ErrorKind::EmptyText, u.id, "in dialogue " + d.id);
            }
            if (!seen_turns.emplace(u.id, d.id).second) {
                throw Error(ErrorKind::DuplicateUtteranceId, u.id);
            }
        }
        total_utterances_ += d.turns.size();
    }
}

double Corpus::avg_length() const noexcept {
    if (dialogues_.empty()) {
        return 0.0;
    }
    return static_cast<double>(total_utterances_) / static_cast<double>(dialogues_.size());
}

const Dialogue* Corpus::find(std::string_view dialogue_id) const {
    auto it = index_.find(std::string(dialogue_id));
    return it == index_.end() ? nullptr : &dialogues_[it->second];
}

const Dialogue& Corpus::at(std::string_view dialogue_id) const {
    if (const Dialogue* d = find(dialogue_id)) {
        return *d;
    }
    throw Error(ErrorKind::UnknownDialogue, std::string(dialogue_id));
}

// ---------------------------------------------------------------------------
// BucketSet

BucketSet::BucketSet(std::vector<IntentBucket> buckets) : buckets_(std::move(buckets)) {
    std::sort(buckets_.begin(), buckets_.end(),
              [](const IntentBucket& a, const IntentBucket& b) { return a.id < b.id; });
    std::unordered_map<std::string_view, std::string_view> seen_utterances;
    for (std::size_t i = 0; i < buckets_.size(); ++i) {
        const IntentBucket& b = buckets_[i];
        if (!index_.emplace(b.id, i).second) {
            throw Error(ErrorKind::DuplicateBucketId, b.id);
        }
        if (b.utterances.empty()) {
            throw Error(ErrorKind::EmptyBucket, b.id);
        }
        for (const Utterance& u : b.utterances) {
            if (u.text.empty() || blank(u.text)) {
                throw Error(ErrorKind::EmptyText, u.id, "in bucket " + b.id);
            }
            if (u.actor != b.actor) {
                throw Error(ErrorKind::UnknownActor, u.id, "member actor differs from bucket " + b.id);
            }
            if (!seen_utterances.emplace(u.id, b.id).second) {
                throw Error(ErrorKind::DuplicateUtteranceId, u.id);
            }
        }
    }
}

std::optional<std::size_t> BucketSet::index_of(std::string_view bucket_id) const {
    auto it = index_.find(std::string(bucket_id));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

const IntentBucket& BucketSet::at(std::string_view bucket_id) const {
    if (auto i = index_of(bucket_id)) {
        return buckets_[*i];
    }
    throw Error(ErrorKind::DanglingBucketRef, std::string(bucket_id));
}

// ---------------------------------------------------------------------------
// FlowGraph

FlowGraph::FlowGraph(std::string root_id, std::vector<FlowNode> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    const std::size_t n = nodes_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!index_.emplace(nodes_[i].id, i).second) {
            throw Error(ErrorKind::DuplicateNodeId, nodes_[i].id);
        }
    }
    auto root = index_of(root_id);
    if (!root) {
        throw Error(ErrorKind::InvalidRoot, root_id, "root is not a node of the flow");
    }
    root_ = *root;
    if (nodes_[root_].bucket_id) {
        throw Error(ErrorKind::InvalidRoot, root_id, "root must not carry a bucket");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (i != root_ && !nodes_[i].bucket_id) {
            throw Error(ErrorKind::DanglingBucketRef, nodes_[i].id, "node has no bucket");
        }
    }

    children_.assign(n, {});
    parents_.assign(n, {});
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [from, to] : edges_) {
        auto f = index_of(from);
        if (!f) {
            throw Error(ErrorKind::UnknownNode, from, "edge " + from + "->" + to);
        }
        auto t = index_of(to);
        if (!t) {
            throw Error(ErrorKind::UnknownNode, to, "edge " + from + "->" + to);
        }
        if (*f == *t) {
            throw Error(ErrorKind::CycleDetected, from + "->" + to, "self loop");
        }
        if (!seen.emplace(*f, *t).second) {
            throw Error(ErrorKind::DuplicateEdge, from + "->" + to);
        }
        if (*t == root_) {
            throw Error(ErrorKind::InvalidRoot, root_id, "edge " + from + "->" + to + " enters the root");
        }
        children_[*f].push_back(*t);
        parents_[*t].push_back(*f);
    }
    auto by_id = [this](std::size_t a, std::size_t b) { return nodes_[a].id < nodes_[b].id; };
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(children_[i].begin(), children_[i].end(), by_id);
        std::sort(parents_[i].begin(), parents_[i].end(), by_id);
    }

    // Kahn's algorithm, smallest id first.
    std::vector<std::size_t> indegree(n);
    for (std::size_t i = 0; i < n; ++i) {
        indegree[i] = parents_[i].size();
    }
    auto later = [this](std::size_t a, std::size_t b) { return nodes_[a].id > nodes_[b].id; };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> ready(later);
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) {
            ready.push(i);
        }
    }
    topo_.reserve(n);
    while (!ready.empty()) {
        std::size_t v = ready.top();
        ready.pop();
        topo_.push_back(v);
        for (std::size_t c : children_[v]) {
            if (--indegree[c] == 0) {
                ready.push(c);
            }
        }
    }
    if (topo_.size() != n) {
        // Every unresolved node keeps an unresolved parent, so walking parent
        // links must revisit a node; the walk between the two visits is a cycle.
        std::size_t v = 0;
        while (indegree[v] == 0) {
            ++v;
        }
        std::vector<std::size_t> walk;
        std::vector<std::size_t> position(n, n);
        while (position[v] == n) {
            position[v] = walk.size();
            walk.push_back(v);
            for (std::size_t p : parents_[v]) {
                if (indegree[p] != 0) {
                    v = p;
                    break;
                }
            }
        }
        const std::size_t head = walk[position[v]];
        const std::size_t tail = walk[position[v] + 1 < walk.size() ? position[v] + 1 : position[v]];
        throw Error(ErrorKind::CycleDetected, nodes_[tail].id + "->" + nodes_[head].id);
    }

    std::vector<bool> reached(n, false);
    reached[root_] = true;
    for (std::size_t v : topo_) {
        if (!reached[v]) {
            continue;
        }
        for (std::size_t c : children_[v]) {
            reached[c] = true;
        }
    }
    std::vector<std::size_t> unreachable;
    for (std::size_t i = 0; i < n; ++i) {
        if (!reached[i]) {
            unreachable.push_back(i);
        }
    }
    if (!unreachable.empty()) {
        std::sort(unreachable.begin(), unreachable.end(), by_id);
        throw Error(ErrorKind::UnreachableNode, nodes_[unreachable.front()].id);
    }
    if (leaves().empty()) {
        throw Error(ErrorKind::NoLeaf, root_id);
    }
}

std::optional<std::size_t> FlowGraph::index_of(std::string_view node_id) const {
    auto it = index_.find(std::string(node_id));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool FlowGraph::has_edge(std::size_t from, std::size_t to) const {
    const auto& c = children_[from];
    return std::find(c.begin(), c.end(), to) != c.end();
}

std::vector<std::size_t> FlowGraph::leaves() const {
    std::vector<std::size_t> out;
    for (std::size_t v : topo_) {
        if (children_[v].empty()) {
            out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end(), [this](std::size_t a, std::size_t b) { return nodes_[a].id < nodes_[b].id; });
    return out;
}

std::uint64_t FlowGraph::count_paths(std::uint64_t cap) const {
    const std::uint64_t limit = cap == std::numeric_limits<std::uint64_t>::max() ? cap : cap + 1;
    std::vector<std::uint64_t> count(nodes_.size(), 0);
    for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
        std::size_t v = *it;
        if (children_[v].empty()) {
            count[v] = 1;
            continue;
        }
        std::uint64_t total = 0;
        for (std::size_t c : children_[v]) {
            total = std::min(limit, total + count[c]);
        }
        count[v] = total;
    }
    return count[root_];
}

std::size_t FlowGraph::shortest_path_length() const {
    std::vector<std::size_t> shortest(nodes_.size(), 0);
    for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
        std::size_t v = *it;
        if (children_[v].empty()) {
            continue;
        }
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for (std::size_t c : children_[v]) {
            best = std::min(best, shortest[c] + 1);
        }
        shortest[v] = best;
    }
    return shortest[root_];
}

void check_bucket_refs(const FlowGraph& graph, const BucketSet& buckets) {
    for (const FlowNode& node : graph.nodes()) {
        if (node.bucket_id && !buckets.index_of(*node.bucket_id)) {
            throw Error(ErrorKind::DanglingBucketRef, node.id, "unknown bucket " + *node.bucket_id);
        }
    }
}

std::vector<FlowPath> enumerate_paths(const FlowGraph& graph, std::uint64_t cap) {
    const std::uint64_t total = graph.count_paths(cap);
    if (total > cap) {
        throw Error(ErrorKind::PathExplosion, graph.root_id(),
                    "more than " + std::to_string(cap) + " root-to-leaf paths");
    }
    std::vector<FlowPath> paths;
    paths.reserve(static_cast<std::size_t>(total));

    // (node, next child slot)
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    stack.emplace_back(graph.root(), 0);
    while (!stack.empty()) {
        auto& [v, next] = stack.back();
        auto children = graph.children(v);
        if (children.empty()) {
            FlowPath path;
            path.node_ids.reserve(stack.size());
            for (const auto& frame : stack) {
                path.node_ids.push_back(graph.node(frame.first).id);
            }
            paths.push_back(std::move(path));
            stack.pop_back();
        } else if (next == children.size()) {
            stack.pop_back();
        } else {
            std::size_t c = children[next++];
            stack.emplace_back(c, 0);
        }
    }
    return paths;
}

std::vector<std::size_t> resolve_path(const FlowGraph& graph, const FlowPath& path) {
    if (path.node_ids.empty() || path.node_ids.front() != graph.root_id()) {
        throw Error(ErrorKind::InvalidPath, path.node_ids.empty() ? std::string() : path.node_ids.front(),
                    "path must start at the root");
    }
    std::vector<std::size_t> out;
    out.reserve(path.node_ids.size());
    for (const std::string& id : path.node_ids) {
        auto i = graph.index_of(id);
        if (!i) {
            throw Error(ErrorKind::InvalidPath, id, "unknown node");
        }
        if (!out.empty() && !graph.has_edge(out.back(), *i)) {
            throw Error(ErrorKind::InvalidPath, graph.node(out.back()).id + "->" + id, "not an edge");
        }
        out.push_back(*i);
    }
    if (!graph.is_leaf(out.back())) {
        throw Error(ErrorKind::InvalidPath, path.node_ids.back(), "path must end at a leaf");
    }
    return out;
}

FlowGraph induced_subflow(const FlowGraph& graph, std::span<const FlowPath> paths) {
    std::vector<bool> keep(graph.node_count(), false);
    std::set<std::pair<std::size_t, std::size_t>> keep_edges;
    keep[graph.root()] = true;
    for (const FlowPath& p : paths) {
        auto idx = resolve_path(graph, p);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            keep[idx[k]] = true;
            if (k > 0) {
                keep_edges.emplace(idx[k - 1], idx[k]);
            }
        }
    }
    std::vector<FlowNode> nodes;
    for (std::size_t i = 0; i < graph.node_count(); ++i) {
        if (keep[i]) {
            nodes.push_back(graph.node(i));
        }
    }
    std::vector<FlowGraph::Edge> edges;
    for (const auto& e : graph.edges()) {
        auto f = *graph.index_of(e.first);
        auto t = *graph.index_of(e.second);
        if (keep_edges.contains({f, t})) {
            edges.push_back(e);
        }
    }
    return FlowGraph(graph.root_id(), std::move(nodes), std::move(edges));
}

} // namespace fudge
