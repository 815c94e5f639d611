#include "fudge/io.hpp"

#include <fstream>
#include <initializer_list>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fudge/error.hpp"

namespace fudge {

using nlohmann::json;

namespace {

class FieldChecker {
public:
    FieldChecker(std::string document, const WarningSink& sink) : document_(std::move(document)), sink_(sink) {}

    void check(const json& object, std::string_view where, std::initializer_list<std::string_view> known) {
        for (const auto& item : object.items()) {
            bool ok = false;
            for (auto k : known) {
                ok = ok || item.key() == k;
            }
            if (ok) {
                continue;
            }
            std::string tag = std::string(where) + "." + item.key();
            if (!reported_.insert(tag).second) {
                continue;
            }
            std::string msg = "warning: " + document_ + ": ignoring unknown field '" + tag + "'";
            if (sink_) {
                sink_(msg);
            } else {
                std::cerr << msg << '\n';
            }
        }
    }

private:
    std::string document_;
    const WarningSink& sink_;
    std::set<std::string> reported_;
};

json parse(std::string_view text, std::string_view what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, std::string(what), e.what());
    }
}

const json& member(const json& object, const char* key, std::string_view where) {
    if (!object.is_object()) {
        throw Error(ErrorKind::Parse, std::string(where), "expected an object");
    }
    auto it = object.find(key);
    if (it == object.end()) {
        throw Error(ErrorKind::Parse, std::string(where), std::string("missing field '") + key + "'");
    }
    return *it;
}

std::string string_member(const json& object, const char* key, std::string_view where) {
    const json& v = member(object, key, where);
    if (!v.is_string()) {
        throw Error(ErrorKind::Parse, std::string(where), std::string("field '") + key + "' must be a string");
    }
    return v.get<std::string>();
}

const json& array_member(const json& object, const char* key, std::string_view where) {
    const json& v = member(object, key, where);
    if (!v.is_array()) {
        throw Error(ErrorKind::Parse, std::string(where), std::string("field '") + key + "' must be an array");
    }
    return v;
}

template <typename Fn>
void for_each_line(std::string_view document, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= document.size()) {
        std::size_t end = document.find('\n', pos);
        if (end == std::string_view::npos) {
            end = document.size();
        }
        std::string_view line = document.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        fn(line, line_no);
    }
}

} // namespace

// ---------------------------------------------------------------------------
// loaders

BucketSet load_buckets(std::string_view bucket_document, const WarningSink& warn) {
    FieldChecker fields("bucket file", warn);
    json doc = parse(bucket_document, "bucket file");
    if (!doc.is_array()) {
        throw Error(ErrorKind::Parse, "bucket file", "top level must be an array");
    }
    std::vector<IntentBucket> buckets;
    buckets.reserve(doc.size());
    for (const json& b : doc) {
        IntentBucket bucket;
        bucket.id = string_member(b, "id", "bucket");
        fields.check(b, "bucket", {"id", "name", "actor", "utterances"});
        bucket.name = b.contains("name") && b["name"].is_string() ? b["name"].get<std::string>() : bucket.id;
        bucket.actor = parse_actor(string_member(b, "actor", bucket.id));
        for (const json& u : array_member(b, "utterances", bucket.id)) {
            fields.check(u, "bucket.utterances", {"id", "text"});
            bucket.utterances.push_back(
                {string_member(u, "id", bucket.id), string_member(u, "text", bucket.id), bucket.actor});
        }
        buckets.push_back(std::move(bucket));
    }
    return BucketSet(std::move(buckets));
}

FlowGraph load_flow_graph(std::string_view flow_document, const BucketSet& buckets, const WarningSink& warn) {
    FieldChecker fields("flow file", warn);
    json doc = parse(flow_document, "flow file");
    fields.check(doc, "flow", {"root", "nodes", "edges"});
    std::string root = string_member(doc, "root", "flow");

    std::vector<FlowNode> nodes;
    bool root_listed = false;
    for (const json& n : array_member(doc, "nodes", "flow")) {
        FlowNode node;
        node.id = string_member(n, "id", "flow.nodes");
        fields.check(n, "nodes", {"id", "bucket"});
        auto b = n.find("bucket");
        if (b != n.end() && !b->is_null()) {
            if (!b->is_string()) {
                throw Error(ErrorKind::Parse, node.id, "bucket must be a string");
            }
            node.bucket_id = b->get<std::string>();
        }
        if (node.id == root) {
            root_listed = true;
            if (node.bucket_id) {
                throw Error(ErrorKind::InvalidRoot, root, "the root is a dummy node and takes no bucket");
            }
        }
        nodes.push_back(std::move(node));
    }
    if (!root_listed) {
        nodes.insert(nodes.begin(), FlowNode{root, std::nullopt});
    }

    std::vector<FlowGraph::Edge> edges;
    for (const json& e : array_member(doc, "edges", "flow")) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
            throw Error(ErrorKind::Parse, "flow.edges", "each edge must be [from, to]");
        }
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }

    FlowGraph graph(root, std::move(nodes), std::move(edges));
    check_bucket_refs(graph, buckets);
    return graph;
}

Flow load_flow(std::string_view flow_document, std::string_view bucket_document, const WarningSink& warn) {
    BucketSet buckets = load_buckets(bucket_document, warn);
    FlowGraph graph = load_flow_graph(flow_document, buckets, warn);
    return {std::move(graph), std::move(buckets)};
}

Corpus load_corpus(std::string_view corpus_document, const WarningSink& warn) {
    FieldChecker fields("corpus file", warn);
    std::vector<Dialogue> dialogues;
    for_each_line(corpus_document, [&](std::string_view line, std::size_t line_no) {
        const std::string where = "corpus line " + std::to_string(line_no);
        json rec = parse(line, where);
        Dialogue d;
        d.id = string_member(rec, "id", where);
        fields.check(rec, "dialogue", {"id", "turns"});
        for (const json& t : array_member(rec, "turns", d.id)) {
            fields.check(t, "turns", {"actor", "text"});
            Utterance u;
            u.id = turn_id(d.id, d.turns.size());
            u.actor = parse_actor(string_member(t, "actor", u.id));
            u.text = string_member(t, "text", u.id);
            d.turns.push_back(std::move(u));
        }
        dialogues.push_back(std::move(d));
    });
    return Corpus(std::move(dialogues));
}

EmbeddingTable load_embeddings(std::string_view document, const WarningSink& warn) {
    FieldChecker fields("embedding file", warn);
    std::optional<EmbeddingTable> table;
    std::vector<double> buffer;
    for_each_line(document, [&](std::string_view line, std::size_t line_no) {
        const std::string where = "embedding line " + std::to_string(line_no);
        json rec = parse(line, where);
        if (!table) {
            const json& dim = member(rec, "dimension", where);
            if (!dim.is_number_unsigned() || dim.get<std::size_t>() == 0) {
                throw Error(ErrorKind::Parse, where, "dimension must be a positive integer");
            }
            fields.check(rec, "header", {"dimension"});
            table.emplace(dim.get<std::size_t>());
            return;
        }
        std::string key = string_member(rec, "key", where);
        fields.check(rec, "record", {"key", "vector"});
        const json& vec = array_member(rec, "vector", key);
        buffer.clear();
        for (const json& x : vec) {
            if (!x.is_number()) {
                throw Error(ErrorKind::Parse, key, "vector components must be numbers");
            }
            buffer.push_back(x.get<double>());
        }
        table->insert(std::move(key), buffer);
    });
    if (!table) {
        throw Error(ErrorKind::Parse, "embedding file", "missing {\"dimension\": D} header");
    }
    return std::move(*table);
}

// ---------------------------------------------------------------------------
// serializers

std::string serialize_flow(const FlowGraph& graph) {
    json nodes = json::array();
    for (const FlowNode& n : graph.nodes()) {
        json node = {{"id", n.id}};
        if (n.bucket_id) {
            node["bucket"] = *n.bucket_id;
        }
        nodes.push_back(std::move(node));
    }
    json edges = json::array();
    for (const auto& [from, to] : graph.edges()) {
        edges.push_back({from, to});
    }
    json doc = {{"root", graph.root_id()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
    return doc.dump(2) + "\n";
}

std::string serialize_buckets(const BucketSet& buckets) {
    json doc = json::array();
    for (const IntentBucket& b : buckets.buckets()) {
        json utterances = json::array();
        for (const Utterance& u : b.utterances) {
            utterances.push_back({{"id", u.id}, {"text", u.text}});
        }
        doc.push_back({{"id", b.id},
                       {"name", b.name},
                       {"actor", std::string(to_string(b.actor))},
                       {"utterances", std::move(utterances)}});
    }
    return doc.dump(2) + "\n";
}

std::string serialize_corpus(const Corpus& corpus) {
    std::string out;
    for (const Dialogue& d : corpus.dialogues()) {
        json turns = json::array();
        for (const Utterance& u : d.turns) {
            turns.push_back({{"actor", std::string(to_string(u.actor))}, {"text", u.text}});
        }
        out += json{{"id", d.id}, {"turns", std::move(turns)}}.dump();
        out += '\n';
    }
    return out;
}

std::string serialize_embeddings(const EmbeddingTable& table) {
    std::string out = json{{"dimension", table.dimension()}}.dump() + "\n";
    for (const std::string& key : table.keys()) {
        auto v = table.at(key);
        out += json{{"key", key}, {"vector", std::vector<double>(v.begin(), v.end())}}.dump();
        out += '\n';
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, path.string(), "cannot open for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Io, path.string(), "cannot open for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw Error(ErrorKind::Io, path.string(), "write failed");
    }
}

} // namespace fudge
