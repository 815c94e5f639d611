#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fudge/align.hpp"
#include "fudge/embedding.hpp"
#include "fudge/metrics.hpp"
#include "fudge/model.hpp"

namespace fudge {

/// Seeded generator threaded explicitly through every randomized routine.
/// Draws are mapped by hand so sequences do not depend on the standard
/// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, n); n must be positive.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    /// Uniform in [lo, hi].
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + index(hi - lo + 1); }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return unit() < p; }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

struct NoiseConfig {
    double paraphrase_jitter = 0.0; // per-turn probability of a perturbed paraphrase
    double insert_prob = 0.0;       // per node: an off-flow turn follows
    double delete_prob = 0.0;       // per node: its turn is dropped
};

enum class Topology {
    Layered, // random layered DAG, merges allowed
    Fan,     // `branching` disjoint chains of length `depth` under the root
};

std::string_view to_string(Topology topology);
Topology parse_topology(std::string_view text);

struct SynthesisConfig {
    std::uint64_t seed = 1;
    std::size_t n_buckets_user = 8;
    std::size_t n_buckets_agent = 8;
    std::size_t branching = 2;
    std::size_t depth = 6;
    std::size_t n_dialogues = 40;
    NoiseConfig noise;
    Topology topology = Topology::Layered;
    /// 0: dialogues follow random walks. k > 0: dialogues are drawn from k
    /// randomly chosen root-to-leaf paths only.
    std::size_t dominant_paths = 0;
    std::size_t paraphrases = 3;
    std::size_t dimension = kDefaultHashDimension;
    /// Vectors occupy coordinate band `vocabulary_band` of `bands` equal
    /// slices, so different bands are exactly orthogonal.
    std::size_t vocabulary_band = 0;
    std::size_t bands = 1;
    std::string id_prefix;

    /// Throws InvalidConfig.
    void validate() const;
};

struct SyntheticData {
    FlowGraph graph;
    BucketSet buckets;
    EmbeddingTable table;
    Corpus corpus;
};

/// hash_embed restricted to one coordinate band of a `dimension` vector.
std::vector<double> banded_hash_embed(std::string_view text, std::size_t dimension, std::size_t band,
                                      std::size_t bands);

/// Random flow, buckets, embeddings and noisy dialogues; fully determined by
/// `cfg.seed`.
SyntheticData synthesize(const SynthesisConfig& cfg);

/// In-task data from `base` in band 0 plus out-of-task dialogues generated
/// from an unrelated flow in band 1, with one merged embedding table.
/// `out_dialogues` = 0 draws as many out-of-task dialogues as in-task ones.
struct SeparationScenario {
    SyntheticData in_task;
    Corpus out_task;
};
SeparationScenario make_separation_scenario(const SynthesisConfig& base, std::size_t out_dialogues = 0);

struct RankedPath {
    FlowPath path;
    std::size_t support = 0; // dialogues whose best path this is
    double cost = 0.0;       // summed path edit distance over the corpus
};

/// Support-ranked paths: support descending, cost ascending, then node ids.
std::vector<RankedPath> rank_paths(const FlowGraph& graph, const Corpus& corpus, const ScoringContext& context,
                                   const CostModel& cm, std::uint64_t path_cap = kDefaultPathCap);

struct SweepPoint {
    std::size_t k = 0;
    std::size_t complexity = 0;
    double mean_fudge = 0.0;
    double nc = 0.0;
    double nf = 0.0;
    double ff1 = 0.0;
};

/// For k = 1..K, scores the sub-flow induced by the top-k ranked paths.
std::vector<SweepPoint> sweep(const FlowGraph& graph, const Corpus& corpus, const ScoringContext& context,
                              const CostModel& cm, std::size_t workers = 1,
                              std::uint64_t path_cap = kDefaultPathCap);
/// Same, over an existing ranking.
std::vector<SweepPoint> sweep(const FlowGraph& graph, const std::vector<RankedPath>& ranked, const Corpus& corpus,
                              const ScoringContext& context, const CostModel& cm, std::size_t workers = 1);

struct GroupStats {
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;
    /// Mean of per-dialogue FuDGE divided by max(1, turns).
    double normalized_mean = 0.0;
};

struct SeparationReport {
    GroupStats positives;
    GroupStats negatives;
    double margin = 0.0;            // negatives.mean - positives.mean
    double normalized_margin = 0.0; // same on the per-turn normalized means
};

SeparationReport separation(const FlowGraph& graph, const Corpus& in_task, const Corpus& out_task,
                            const ScoringContext& context, const CostModel& cm, std::size_t workers = 1);

/// Samples round(ratio * |in_task|) in-task dialogues (at least one) and the
/// same number of out-of-task dialogues (capped by availability).
std::pair<Corpus, Corpus> sample_mix(const Corpus& in_task, const Corpus& out_task, double ratio, Rng& rng);

} // namespace fudge
