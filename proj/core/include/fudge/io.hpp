#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include "fudge/embedding.hpp"
#include "fudge/model.hpp"

namespace fudge {

/// Receives one line per unknown field (deduplicated per document).
/// An empty sink writes to standard error.
using WarningSink = std::function<void(const std::string&)>;

/// Flow file:    {"root": id, "nodes": [{"id","bucket"}...], "edges": [[from,to]...]}
/// Bucket file:  [{"id","name","actor","utterances":[{"id","text"}...]}...]
Flow load_flow(std::string_view flow_document, std::string_view bucket_document, const WarningSink& warn = {});
BucketSet load_buckets(std::string_view bucket_document, const WarningSink& warn = {});
/// Parses the flow file against an already-loaded bucket set.
FlowGraph load_flow_graph(std::string_view flow_document, const BucketSet& buckets, const WarningSink& warn = {});

/// Corpus file (JSONL): {"id", "turns": [{"actor","text"}...]} per line.
/// Turn ids are assigned as "<dialogue_id>#<turn_index>". Blank lines skipped.
Corpus load_corpus(std::string_view corpus_document, const WarningSink& warn = {});

/// Embedding table (JSONL): header {"dimension": D}, then
/// {"key": id, "vector": [...]} per line.
EmbeddingTable load_embeddings(std::string_view document, const WarningSink& warn = {});

std::string serialize_flow(const FlowGraph& graph);
std::string serialize_buckets(const BucketSet& buckets);
std::string serialize_corpus(const Corpus& corpus);
std::string serialize_embeddings(const EmbeddingTable& table);

/// Whole-file read / write; throws Error(Io).
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace fudge
