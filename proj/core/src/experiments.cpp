#include "fudge/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "fudge/error.hpp"

namespace fudge {

std::string_view to_string(Topology topology) { return topology == Topology::Layered ? "layered" : "fan"; }

Topology parse_topology(std::string_view text) {
    if (text == "layered") {
        return Topology::Layered;
    }
    if (text == "fan") {
        return Topology::Fan;
    }
    throw Error(ErrorKind::InvalidConfig, std::string(text), "topology must be layered or fan");
}

void SynthesisConfig::validate() const {
    auto probability = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(ErrorKind::InvalidConfig, name, "must lie in [0, 1]");
        }
    };
    probability(noise.paraphrase_jitter, "paraphrase_jitter");
    probability(noise.insert_prob, "insert_prob");
    probability(noise.delete_prob, "delete_prob");
    if (depth < 1) {
        throw Error(ErrorKind::InvalidConfig, "depth", "must be at least 1");
    }
    if (branching < 1) {
        throw Error(ErrorKind::InvalidConfig, "branching", "must be at least 1");
    }
    if (n_buckets_user < 1 || (depth > 1 && n_buckets_agent < 1)) {
        throw Error(ErrorKind::InvalidConfig, "n_buckets", "need user buckets, and agent buckets when depth > 1");
    }
    if (paraphrases < 1) {
        throw Error(ErrorKind::InvalidConfig, "paraphrases", "must be at least 1");
    }
    if (bands < 1 || vocabulary_band >= bands) {
        throw Error(ErrorKind::InvalidConfig, "vocabulary_band", "must be below bands");
    }
    if (dimension / bands < 8) {
        throw Error(ErrorKind::InvalidConfig, "dimension", "each band needs at least 8 coordinates");
    }
}

std::vector<double> banded_hash_embed(std::string_view text, std::size_t dimension, std::size_t band,
                                      std::size_t bands) {
    const std::size_t width = dimension / bands;
    std::vector<double> out(dimension, 0.0);
    const auto inner = hash_embed(text, width);
    std::copy(inner.begin(), inner.end(), out.begin() + static_cast<std::ptrdiff_t>(band * width));
    return out;
}

namespace {

std::string padded(const char* fmt, std::size_t a, std::size_t b = 0) {
    char buf[32];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return buf;
}

std::vector<std::string> make_vocabulary(Rng& rng, std::size_t size) {
    static constexpr std::string_view consonants = "bdfgklmnprstvz";
    static constexpr std::string_view vowels = "aeiou";
    std::set<std::string> seen;
    std::vector<std::string> words;
    while (words.size() < size) {
        std::string w;
        const std::size_t syllables = rng.between(2, 3);
        for (std::size_t s = 0; s < syllables; ++s) {
            w += consonants[rng.index(consonants.size())];
            w += vowels[rng.index(vowels.size())];
        }
        if (seen.insert(w).second) {
            words.push_back(std::move(w));
        }
    }
    return words;
}

std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(' ', pos);
        if (end == std::string::npos) {
            end = text.size();
        }
        out.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    return out;
}

std::string join_words(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) {
            out += ' ';
        }
        out += w;
    }
    return out;
}

std::string random_phrase(Rng& rng, const std::vector<std::string>& vocabulary, std::size_t length) {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < length; ++i) {
        words.push_back(vocabulary[rng.index(vocabulary.size())]);
    }
    return join_words(words);
}

/// Swaps one word for a different vocabulary word.
std::string perturb(Rng& rng, const std::string& text, const std::vector<std::string>& vocabulary) {
    auto words = split_words(text);
    const std::size_t at = rng.index(words.size());
    std::string replacement = words[at];
    while (replacement == words[at]) {
        replacement = vocabulary[rng.index(vocabulary.size())];
    }
    words[at] = replacement;
    return join_words(words);
}

Actor actor_at_depth(std::size_t layer) { return layer % 2 == 1 ? Actor::User : Actor::Agent; }

struct Skeleton {
    // layers[0] = {root}
    std::vector<std::vector<std::string>> layers;
    std::vector<FlowGraph::Edge> edges;
};

Skeleton layered_skeleton(const SynthesisConfig& cfg, Rng& rng) {
    Skeleton s;
    s.layers.push_back({cfg.id_prefix + "root"});
    const std::size_t max_width = 2 * cfg.branching + 1;
    std::size_t width = 1;
    for (std::size_t layer = 1; layer <= cfg.depth; ++layer) {
        const std::size_t hi = std::min(width * cfg.branching, max_width);
        const std::size_t lo = std::min(hi, std::max<std::size_t>(1, width > 1 ? width - 1 : 1));
        const std::size_t next_width = rng.between(lo, hi);
        std::vector<std::string> ids;
        for (std::size_t j = 0; j < next_width; ++j) {
            ids.push_back(cfg.id_prefix + padded("n%02zu_%02zu", layer, j));
        }
        const auto& parents = s.layers.back();
        std::vector<std::set<std::size_t>> children(parents.size());
        // Round-robin guarantees every child a parent within the fan-out cap.
        for (std::size_t j = 0; j < next_width; ++j) {
            children[j % parents.size()].insert(j);
        }
        for (auto& kids : children) {
            const std::size_t target = std::min(next_width, rng.between(1, cfg.branching));
            while (kids.size() < target) {
                kids.insert(rng.index(next_width));
            }
        }
        for (std::size_t p = 0; p < parents.size(); ++p) {
            for (std::size_t c : children[p]) {
                s.edges.emplace_back(parents[p], ids[c]);
            }
        }
        s.layers.push_back(std::move(ids));
        width = next_width;
    }
    return s;
}

Skeleton fan_skeleton(const SynthesisConfig& cfg) {
    Skeleton s;
    const std::string root = cfg.id_prefix + "root";
    s.layers.push_back({root});
    for (std::size_t layer = 1; layer <= cfg.depth; ++layer) {
        std::vector<std::string> ids;
        for (std::size_t k = 0; k < cfg.branching; ++k) {
            ids.push_back(cfg.id_prefix + padded("p%02zu_%02zu", k, layer));
            s.edges.emplace_back(layer == 1 ? root : s.layers.back()[k], ids.back());
        }
        s.layers.push_back(std::move(ids));
    }
    return s;
}

} // namespace

SyntheticData synthesize(const SynthesisConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const auto vocabulary = make_vocabulary(rng, 240);
    auto embed = [&](std::string_view text) {
        return banded_hash_embed(text, cfg.dimension, cfg.vocabulary_band, cfg.bands);
    };

    // Buckets: a seed phrase plus single-word paraphrases.
    std::vector<IntentBucket> buckets;
    auto make_buckets = [&](Actor actor, std::size_t count, char tag) {
        for (std::size_t i = 0; i < count; ++i) {
            IntentBucket b;
            b.id = cfg.id_prefix + std::string(1, tag) + padded("%03zu", i);
            b.actor = actor;
            const std::string seed_phrase = random_phrase(rng, vocabulary, 5);
            auto words = split_words(seed_phrase);
            b.name = join_words({words[0], words[1], words[2]});
            for (std::size_t k = 0; k < cfg.paraphrases; ++k) {
                const std::string text = k == 0 ? seed_phrase : perturb(rng, seed_phrase, vocabulary);
                b.utterances.push_back({b.id + "." + std::to_string(k), text, actor});
            }
            buckets.push_back(std::move(b));
        }
    };
    make_buckets(Actor::User, cfg.n_buckets_user, 'u');
    make_buckets(Actor::Agent, cfg.n_buckets_agent, 'a');

    Skeleton skeleton = cfg.topology == Topology::Layered ? layered_skeleton(cfg, rng) : fan_skeleton(cfg);

    // Bucket assignment cycles through a shuffled list per actor.
    std::map<Actor, std::vector<std::size_t>> pool;
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        pool[buckets[i].actor].push_back(i);
    }
    for (auto& [actor, ids] : pool) {
        rng.shuffle(ids);
    }
    std::map<Actor, std::size_t> cursor;
    std::vector<FlowNode> nodes{{skeleton.layers[0][0], std::nullopt}};
    for (std::size_t layer = 1; layer < skeleton.layers.size(); ++layer) {
        const Actor actor = actor_at_depth(layer);
        for (const std::string& id : skeleton.layers[layer]) {
            const auto& ids = pool[actor];
            const std::size_t b = ids[cursor[actor]++ % ids.size()];
            nodes.push_back({id, buckets[b].id});
        }
    }

    SyntheticData out;
    out.buckets = BucketSet(std::move(buckets));
    out.graph = FlowGraph(skeleton.layers[0][0], std::move(nodes), std::move(skeleton.edges));
    out.table = EmbeddingTable(cfg.dimension);
    for (const IntentBucket& b : out.buckets.buckets()) {
        for (const Utterance& u : b.utterances) {
            out.table.insert(u.id, embed(u.text));
        }
    }

    std::vector<std::vector<std::size_t>> chosen_paths;
    if (cfg.dominant_paths > 0) {
        const auto all = enumerate_paths(out.graph);
        std::vector<std::size_t> order(all.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        rng.shuffle(order);
        order.resize(std::min(order.size(), cfg.dominant_paths));
        std::sort(order.begin(), order.end());
        for (std::size_t i : order) {
            chosen_paths.push_back(resolve_path(out.graph, all[i]));
        }
    }

    std::vector<Dialogue> dialogues;
    for (std::size_t d = 0; d < cfg.n_dialogues; ++d) {
        std::vector<std::size_t> path;
        if (!chosen_paths.empty()) {
            path = chosen_paths[rng.index(chosen_paths.size())];
        } else {
            std::size_t v = out.graph.root();
            path.push_back(v);
            while (!out.graph.is_leaf(v)) {
                auto kids = out.graph.children(v);
                v = kids[rng.index(kids.size())];
                path.push_back(v);
            }
        }

        Dialogue dialogue;
        dialogue.id = cfg.id_prefix + padded("d%04zu", d);
        auto emit = [&](std::string text, Actor actor, std::span<const double> vector) {
            Utterance u{turn_id(dialogue.id, dialogue.turns.size()), std::move(text), actor};
            out.table.insert(u.id, vector);
            dialogue.turns.push_back(std::move(u));
        };
        for (std::size_t k = 1; k < path.size(); ++k) {
            const IntentBucket& bucket = out.buckets.at(*out.graph.node(path[k]).bucket_id);
            if (!rng.chance(cfg.noise.delete_prob)) {
                const Utterance& member = bucket.utterances[rng.index(bucket.utterances.size())];
                if (rng.chance(cfg.noise.paraphrase_jitter)) {
                    std::string text = perturb(rng, member.text, vocabulary);
                    const auto vec = embed(text);
                    emit(std::move(text), bucket.actor, vec);
                } else {
                    emit(member.text, bucket.actor, out.table.at(member.id));
                }
            }
            if (rng.chance(cfg.noise.insert_prob)) {
                const Actor actor = rng.chance(0.5) ? Actor::User : Actor::Agent;
                std::string text = random_phrase(rng, vocabulary, 5);
                const auto vec = embed(text);
                emit(std::move(text), actor, vec);
            }
        }
        dialogues.push_back(std::move(dialogue));
    }
    out.corpus = Corpus(std::move(dialogues));
    return out;
}

SeparationScenario make_separation_scenario(const SynthesisConfig& base, std::size_t out_dialogues) {
    SynthesisConfig pos = base;
    pos.vocabulary_band = 0;
    pos.bands = 2;
    SynthesisConfig neg = pos;
    neg.vocabulary_band = 1;
    neg.seed = base.seed ^ 0x9e3779b97f4a7c15ULL;
    neg.id_prefix = base.id_prefix + "neg-";
    if (out_dialogues > 0) {
        neg.n_dialogues = out_dialogues;
    }

    SeparationScenario s{synthesize(pos), {}};
    SyntheticData other = synthesize(neg);
    s.in_task.table.merge(other.table);
    s.out_task = std::move(other.corpus);
    return s;
}

// ---------------------------------------------------------------------------
// ranking and sweeps

std::vector<RankedPath> rank_paths(const FlowGraph& graph, const Corpus& corpus, const ScoringContext& context,
                                   const CostModel& cm, std::uint64_t path_cap) {
    cm.validate();
    const auto paths = enumerate_paths(graph, path_cap);
    std::vector<RankedPath> ranked;
    ranked.reserve(paths.size());
    std::map<FlowPath, std::size_t> slot;
    for (const FlowPath& p : paths) {
        slot.emplace(p, ranked.size());
        ranked.push_back({p, 0, 0.0});
    }
    for (const Dialogue& d : corpus.dialogues()) {
        const AlignmentTrace trace = backtrace(d, graph, context, cm);
        ++ranked[slot.at(trace.best_path)].support;
        SubstitutionTable costs(d, graph, context, cm);
        for (RankedPath& r : ranked) {
            r.cost += path_edit_distance(d, graph, r.path, costs, cm).total;
        }
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedPath& a, const RankedPath& b) {
        if (a.support != b.support) {
            return a.support > b.support;
        }
        if (a.cost != b.cost) {
            return a.cost < b.cost;
        }
        return a.path < b.path;
    });
    return ranked;
}

std::vector<SweepPoint> sweep(const FlowGraph& graph, const std::vector<RankedPath>& ranked, const Corpus& corpus,
                              const ScoringContext& context, const CostModel& cm, std::size_t workers) {
    std::vector<SweepPoint> points;
    std::vector<FlowPath> top;
    for (std::size_t k = 1; k <= ranked.size(); ++k) {
        top.push_back(ranked[k - 1].path);
        const FlowGraph sub = induced_subflow(graph, top);
        const CorpusScore score = corpus_fudge(corpus, sub, context, cm, workers);
        const FlowScores s = ff1(score.mean, complexity(sub), corpus);
        points.push_back({k, complexity(sub), score.mean, s.nc, s.nf, s.ff1});
    }
    return points;
}

std::vector<SweepPoint> sweep(const FlowGraph& graph, const Corpus& corpus, const ScoringContext& context,
                              const CostModel& cm, std::size_t workers, std::uint64_t path_cap) {
    return sweep(graph, rank_paths(graph, corpus, context, cm, path_cap), corpus, context, cm, workers);
}

// ---------------------------------------------------------------------------
// separation

namespace {

GroupStats group_stats(const Corpus& corpus, const CorpusScore& score) {
    GroupStats g;
    g.mean = score.mean;
    g.std = score.std;
    g.n = corpus.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const double turns = static_cast<double>(std::max<std::size_t>(1, corpus.dialogues()[i].size()));
        sum += score.per_dialogue[i].second / turns;
    }
    g.normalized_mean = sum / static_cast<double>(corpus.size());
    return g;
}

} // namespace

SeparationReport separation(const FlowGraph& graph, const Corpus& in_task, const Corpus& out_task,
                            const ScoringContext& context, const CostModel& cm, std::size_t workers) {
    SeparationReport r;
    r.positives = group_stats(in_task, corpus_fudge(in_task, graph, context, cm, workers));
    r.negatives = group_stats(out_task, corpus_fudge(out_task, graph, context, cm, workers));
    r.margin = r.negatives.mean - r.positives.mean;
    r.normalized_margin = r.negatives.normalized_mean - r.positives.normalized_mean;
    return r;
}

std::pair<Corpus, Corpus> sample_mix(const Corpus& in_task, const Corpus& out_task, double ratio, Rng& rng) {
    if (in_task.empty() || out_task.empty()) {
        throw Error(ErrorKind::EmptyCorpus, {}, "separation needs both corpora");
    }
    if (!(ratio > 0.0 && ratio <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "ratio", "must lie in (0, 1]");
    }
    const auto take = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(ratio * static_cast<double>(in_task.size()))));
    auto pick = [&rng](const Corpus& c, std::size_t count) {
        std::vector<std::size_t> order(c.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        rng.shuffle(order);
        order.resize(std::min(count, order.size()));
        std::sort(order.begin(), order.end());
        std::vector<Dialogue> out;
        for (std::size_t i : order) {
            out.push_back(c.dialogues()[i]);
        }
        return Corpus(std::move(out));
    };
    Corpus positives = pick(in_task, take);
    Corpus negatives = pick(out_task, take);
    return {std::move(positives), std::move(negatives)};
}

} // namespace fudge
