#include "fudge/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>

#include "fudge/error.hpp"

namespace fudge {

namespace {

void normalize_into(std::span<const double> in, double* out, std::string_view key) {
    double norm2 = 0.0;
    for (double x : in) {
        norm2 += x * x;
    }
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
        throw Error(ErrorKind::ZeroVector, std::string(key), "vector has no usable length");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = in[i] * inv;
    }
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

// ---------------------------------------------------------------------------
// EmbeddingTable

EmbeddingTable::EmbeddingTable(std::size_t dimension) : dimension_(dimension) {}

bool EmbeddingTable::contains(std::string_view key) const { return index_.contains(std::string(key)); }

void EmbeddingTable::insert(std::string key, std::span<const double> vector) {
    if (contains(key)) {
        throw Error(ErrorKind::DuplicateUtteranceId, key, "embedding key defined twice");
    }
    try_insert(std::move(key), vector);
}

bool EmbeddingTable::try_insert(std::string key, std::span<const double> vector) {
    if (vector.size() != dimension_ || dimension_ == 0) {
        throw Error(ErrorKind::DimensionMismatch, key,
                    "expected " + std::to_string(dimension_) + " components, got " + std::to_string(vector.size()));
    }
    if (contains(key)) {
        return false;
    }
    // `vector` may point into data_ itself.
    const std::vector<double> copy(vector.begin(), vector.end());
    const std::size_t offset = data_.size();
    data_.resize(offset + dimension_);
    normalize_into(copy, data_.data() + offset, key);
    index_.emplace(key, keys_.size());
    keys_.push_back(std::move(key));
    return true;
}

std::span<const double> EmbeddingTable::at(std::string_view key) const {
    auto it = index_.find(std::string(key));
    if (it == index_.end()) {
        throw Error(ErrorKind::MissingEmbedding, std::string(key));
    }
    return {data_.data() + it->second * dimension_, dimension_};
}

void EmbeddingTable::merge(const EmbeddingTable& other) {
    if (other.dimension_ != dimension_) {
        throw Error(ErrorKind::DimensionMismatch, {},
                    "cannot merge tables of dimension " + std::to_string(dimension_) + " and " +
                        std::to_string(other.dimension_));
    }
    for (const std::string& key : other.keys_) {
        try_insert(key, other.at(key));
    }
}

// ---------------------------------------------------------------------------
// distances

std::string_view to_string(DistanceVariant variant) { return variant == DistanceVariant::Min ? "min" : "centroid"; }

DistanceVariant parse_variant(std::string_view text) {
    if (text == "min") {
        return DistanceVariant::Min;
    }
    if (text == "centroid") {
        return DistanceVariant::Centroid;
    }
    throw Error(ErrorKind::InvalidConfig, std::string(text), "variant must be min or centroid");
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::DimensionMismatch, {},
                    std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    return std::clamp(1.0 - dot(a, b), 0.0, 1.0);
}

BucketCentroid bucket_centroid(const IntentBucket& bucket, const EmbeddingTable& table) {
    std::vector<double> mean(table.dimension(), 0.0);
    for (const Utterance& u : bucket.utterances) {
        auto v = table.at(u.id);
        for (std::size_t i = 0; i < mean.size(); ++i) {
            mean[i] += v[i];
        }
    }
    const double count = static_cast<double>(bucket.utterances.size());
    double norm2 = 0.0;
    for (double& x : mean) {
        x /= count;
        norm2 += x * x;
    }
    if (!(norm2 > 1e-24)) {
        throw Error(ErrorKind::DegenerateCentroid, bucket.id, "member vectors cancel out");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : mean) {
        x *= inv;
    }
    return {bucket.id, std::move(mean)};
}

double intent_utterance_distance(const IntentBucket& bucket, const Utterance& u, DistanceVariant variant,
                                 const EmbeddingTable& table, const BucketCentroid& centroid) {
    if (bucket.actor != u.actor) {
        return kInfinity;
    }
    auto e = table.at(u.id);
    if (variant == DistanceVariant::Centroid) {
        return cosine_distance(centroid.vector, e);
    }
    double best = kInfinity;
    for (const Utterance& member : bucket.utterances) {
        best = std::min(best, cosine_distance(table.at(member.id), e));
    }
    return best;
}

double intent_intent_distance(const IntentBucket& b1, const BucketCentroid& c1, const IntentBucket& b2,
                              const BucketCentroid& c2) {
    if (b1.actor != b2.actor) {
        return kInfinity;
    }
    if (b1.id == b2.id) {
        return 0.0;
    }
    return cosine_distance(c1.vector, c2.vector);
}

// ---------------------------------------------------------------------------
// hashing embedder

std::vector<double> hash_embed(std::string_view text, std::size_t dimension) {
    if (dimension < 8) {
        throw Error(ErrorKind::InvalidConfig, std::to_string(dimension), "hash dimension must be at least 8");
    }
    std::string norm = " ";
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            pending_space = norm.size() > 1;
            continue;
        }
        if (pending_space) {
            norm += ' ';
            pending_space = false;
        }
        norm += static_cast<char>(std::tolower(c));
    }
    if (norm.size() == 1) {
        throw Error(ErrorKind::EmptyText, std::string(text));
    }
    norm += ' ';

    std::vector<double> counts(dimension, 0.0);
    std::string_view view(norm);
    for (std::size_t i = 0; i + 3 <= view.size(); ++i) {
        counts[fnv1a(view.substr(i, 3)) % dimension] += 1.0;
    }
    double norm2 = 0.0;
    for (double x : counts) {
        norm2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : counts) {
        x *= inv;
    }
    return counts;
}

namespace {

void add_one(EmbeddingTable& table, std::unordered_map<std::string, std::string>& texts, const Utterance& u) {
    auto [it, fresh] = texts.emplace(u.id, u.text);
    if (!fresh && it->second != u.text) {
        throw Error(ErrorKind::DuplicateUtteranceId, u.id, "same key used for different texts");
    }
    if (!table.contains(u.id)) {
        table.insert(u.id, hash_embed(u.text, table.dimension()));
    }
}

} // namespace

void add_hash_embeddings(EmbeddingTable& table, const BucketSet& buckets) {
    std::unordered_map<std::string, std::string> texts;
    for (const IntentBucket& b : buckets.buckets()) {
        for (const Utterance& u : b.utterances) {
            add_one(table, texts, u);
        }
    }
}

void add_hash_embeddings(EmbeddingTable& table, const Corpus& corpus) {
    std::unordered_map<std::string, std::string> texts;
    for (const Dialogue& d : corpus.dialogues()) {
        for (const Utterance& u : d.turns) {
            add_one(table, texts, u);
        }
    }
}

// ---------------------------------------------------------------------------
// ScoringContext

ScoringContext::ScoringContext(BucketSet buckets, EmbeddingTable table)
    : buckets_(std::move(buckets)), table_(std::move(table)) {
    centroids_.reserve(buckets_.size());
    for (const IntentBucket& b : buckets_.buckets()) {
        centroids_.push_back(bucket_centroid(b, table_));
    }
}

double ScoringContext::intent_utterance_distance(std::size_t bucket, const Utterance& u,
                                                 DistanceVariant variant) const {
    return fudge::intent_utterance_distance(buckets_[bucket], u, variant, table_, centroids_[bucket]);
}

double ScoringContext::intent_intent_distance(std::size_t b1, std::size_t b2) const {
    return fudge::intent_intent_distance(buckets_[b1], centroids_[b1], buckets_[b2], centroids_[b2]);
}

std::size_t ScoringContext::nearest_bucket(const Utterance& u, DistanceVariant variant) const {
    std::size_t best = buckets_.size();
    double best_distance = kInfinity;
    // Buckets are sorted by id, so strict < keeps the smallest id on ties.
    for (std::size_t b = 0; b < buckets_.size(); ++b) {
        if (buckets_[b].actor != u.actor) {
            continue;
        }
        const double d = intent_utterance_distance(b, u, variant);
        if (best == buckets_.size() || d < best_distance) {
            best = b;
            best_distance = d;
        }
    }
    if (best == buckets_.size()) {
        throw Error(ErrorKind::NoCandidateBucket, u.id, "no bucket with actor " + std::string(to_string(u.actor)));
    }
    return best;
}

} // namespace fudge
