#include "fudge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "fudge/error.hpp"

namespace fudge {

std::pair<double, double> mean_std(const std::vector<double>& values) {
    if (values.empty()) {
        return {0.0, 0.0};
    }
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : values) {
        sq += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(sq / n)};
}

CorpusScore corpus_fudge(const Corpus& corpus, const FlowGraph& graph, const ScoringContext& context,
                         const CostModel& cm, std::size_t workers, Algorithm algorithm) {
    if (corpus.empty()) {
        throw Error(ErrorKind::EmptyCorpus, {}, "cannot score an empty corpus");
    }
    cm.validate();
    const auto& dialogues = corpus.dialogues();
    std::vector<double> values(dialogues.size(), 0.0);

    auto score_one = [&](std::size_t i) {
        values[i] = algorithm == Algorithm::Naive ? naive_fudge(dialogues[i], graph, context, cm)
                                                  : efficient_fudge(dialogues[i], graph, context, cm);
    };

    workers = std::clamp<std::size_t>(workers, 1, dialogues.size());
    if (workers == 1) {
        for (std::size_t i = 0; i < dialogues.size(); ++i) {
            score_one(i);
        }
    } else {
        std::vector<std::exception_ptr> failures(workers);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < dialogues.size(); i += workers) {
                        score_one(i);
                    }
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        for (auto& f : failures) {
            if (f) {
                std::rethrow_exception(f);
            }
        }
    }

    CorpusScore out;
    out.per_dialogue.reserve(dialogues.size());
    for (std::size_t i = 0; i < dialogues.size(); ++i) {
        out.per_dialogue.emplace_back(dialogues[i].id, values[i]);
    }
    std::tie(out.mean, out.std) = mean_std(values);
    return out;
}

std::size_t complexity(const FlowGraph& graph) { return graph.node_count(); }

double ff1_from_normalized(double nc, double nf) {
    const double a = 1.0 - nc;
    const double b = 1.0 - nf;
    if (a + b <= 0.0) {
        return 0.0;
    }
    return 2.0 * a * b / (a + b);
}

FlowScores ff1(double mean_fudge, std::size_t complexity, const Corpus& corpus) {
    if (corpus.empty() || corpus.total_utterances() == 0) {
        throw Error(ErrorKind::EmptyCorpus, {}, "normalization needs at least one utterance");
    }
    FlowScores s;
    s.nc = std::clamp(static_cast<double>(complexity) / static_cast<double>(corpus.total_utterances()), 0.0, 1.0);
    s.nf = std::clamp(mean_fudge / corpus.avg_length(), 0.0, 1.0);
    s.ff1 = ff1_from_normalized(s.nc, s.nf);
    return s;
}

MetricReport evaluate_flow(const Corpus& corpus, const FlowGraph& graph, const ScoringContext& context,
                           const CostModel& cm, std::size_t workers, Algorithm algorithm) {
    CorpusScore score = corpus_fudge(corpus, graph, context, cm, workers, algorithm);
    MetricReport r;
    r.dialogues = corpus.size();
    r.total_utterances = corpus.total_utterances();
    r.avg_length = corpus.avg_length();
    r.mean_fudge = score.mean;
    r.std_fudge = score.std;
    r.complexity = complexity(graph);
    const FlowScores s = ff1(score.mean, r.complexity, corpus);
    r.nc = s.nc;
    r.nf = s.nf;
    r.ff1 = s.ff1;
    r.per_dialogue = std::move(score.per_dialogue);
    return r;
}

} // namespace fudge
