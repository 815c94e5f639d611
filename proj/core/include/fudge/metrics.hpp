#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fudge/align.hpp"
#include "fudge/embedding.hpp"
#include "fudge/model.hpp"

namespace fudge {

enum class Algorithm { Efficient, Naive };

struct CorpusScore {
    std::vector<std::pair<std::string, double>> per_dialogue;
    double mean = 0.0;
    double std = 0.0; // population
};

/// FuDGE of every dialogue against `graph`, fanned out over `workers`
/// threads. Aggregation runs in dialogue order, so the result does not
/// depend on `workers`. Throws EmptyCorpus.
CorpusScore corpus_fudge(const Corpus& corpus, const FlowGraph& graph, const ScoringContext& context,
                         const CostModel& cm, std::size_t workers = 1, Algorithm algorithm = Algorithm::Efficient);

/// Mean and population standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& values);

/// Node count, root included.
std::size_t complexity(const FlowGraph& graph);

struct FlowScores {
    double nc = 0.0;
    double nf = 0.0;
    double ff1 = 0.0;
};

/// Harmonic mean of (1 - nc) and (1 - nf); 0 when both are 0.
double ff1_from_normalized(double nc, double nf);

/// nc = |V| / total utterances, nf = mean FuDGE / avg length, both clamped
/// to [0, 1]. Throws EmptyCorpus.
FlowScores ff1(double mean_fudge, std::size_t complexity, const Corpus& corpus);

struct MetricReport {
    std::vector<std::pair<std::string, double>> per_dialogue;
    std::size_t dialogues = 0;
    std::size_t total_utterances = 0;
    double avg_length = 0.0;
    double mean_fudge = 0.0;
    double std_fudge = 0.0;
    std::size_t complexity = 0;
    double nc = 0.0;
    double nf = 0.0;
    double ff1 = 0.0;
};

MetricReport evaluate_flow(const Corpus& corpus, const FlowGraph& graph, const ScoringContext& context,
                           const CostModel& cm, std::size_t workers = 1, Algorithm algorithm = Algorithm::Efficient);

} // namespace fudge
