#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fudge/model.hpp"

namespace fudge {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Key -> unit-length vector map with a fixed dimension. Vectors are
/// normalized on insertion; zero vectors and dimension drift are rejected.
class EmbeddingTable {
public:
    explicit EmbeddingTable(std::size_t dimension = 0);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return keys_.size(); }
    bool contains(std::string_view key) const;

    /// Throws DuplicateUtteranceId if `key` is already present.
    void insert(std::string key, std::span<const double> vector);
    /// Returns false (and leaves the table untouched) if `key` exists.
    bool try_insert(std::string key, std::span<const double> vector);

    /// Throws MissingEmbedding.
    std::span<const double> at(std::string_view key) const;

    /// Keys in insertion order.
    const std::vector<std::string>& keys() const noexcept { return keys_; }

    /// Copies every entry of `other` whose key is absent here.
    void merge(const EmbeddingTable& other);

private:
    std::size_t dimension_;
    std::vector<std::string> keys_;
    std::vector<double> data_;
    std::unordered_map<std::string, std::size_t> index_;
};

enum class DistanceVariant { Min, Centroid };

std::string_view to_string(DistanceVariant variant);
DistanceVariant parse_variant(std::string_view text);

struct BucketCentroid {
    std::string bucket_id;
    std::vector<double> vector;
};

double dot(std::span<const double> a, std::span<const double> b);

/// clamp(1 - a.b, 0, 1) for unit vectors. Throws DimensionMismatch.
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// Mean of the member vectors, re-normalized to unit length.
BucketCentroid bucket_centroid(const IntentBucket& bucket, const EmbeddingTable& table);

/// d1: +inf across actors; otherwise nearest-member (Min) or centroid
/// (Centroid) cosine distance.
double intent_utterance_distance(const IntentBucket& bucket, const Utterance& u, DistanceVariant variant,
                                 const EmbeddingTable& table, const BucketCentroid& centroid);

/// d2: +inf across actors; otherwise cosine distance of the centroids.
double intent_intent_distance(const IntentBucket& b1, const BucketCentroid& c1, const IntentBucket& b2,
                              const BucketCentroid& c2);

/// Deterministic character-trigram feature hashing embedder. Lowercases,
/// collapses whitespace, pads with one space on each side, hashes every
/// trigram (FNV-1a) into [0, dimension) and L2-normalizes the counts.
std::vector<double> hash_embed(std::string_view text, std::size_t dimension);

inline constexpr std::size_t kDefaultHashDimension = 256;

/// Embeds every bucket member / corpus turn not already in `table`.
/// Throws DuplicateUtteranceId when an existing key maps to different text.
void add_hash_embeddings(EmbeddingTable& table, const BucketSet& buckets);
void add_hash_embeddings(EmbeddingTable& table, const Corpus& corpus);

/// Buckets and embeddings bundled for scoring, with centroids precomputed
/// for every bucket. Immutable after construction.
class ScoringContext {
public:
    ScoringContext(BucketSet buckets, EmbeddingTable table);

    const BucketSet& buckets() const noexcept { return buckets_; }
    const EmbeddingTable& table() const noexcept { return table_; }
    const BucketCentroid& centroid(std::size_t bucket) const { return centroids_[bucket]; }

    double intent_utterance_distance(std::size_t bucket, const Utterance& u, DistanceVariant variant) const;
    double intent_intent_distance(std::size_t b1, std::size_t b2) const;

    /// B*: argmin over same-actor buckets of d1, ties to the smaller bucket
    /// id. Throws NoCandidateBucket.
    std::size_t nearest_bucket(const Utterance& u, DistanceVariant variant) const;

private:
    BucketSet buckets_;
    EmbeddingTable table_;
    std::vector<BucketCentroid> centroids_;
};

} // namespace fudge
