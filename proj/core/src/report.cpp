#include "fudge/report.hpp"

#include <algorithm>
#include <cstdio>

#include "json.hpp"

#include "fudge/error.hpp"

namespace fudge {

using nlohmann::ordered_json;

namespace {

std::string num(double v, int precision = 6) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

void attach(ordered_json& doc, std::string_view provenance) {
    if (provenance.empty()) {
        return;
    }
    try {
        doc["provenance"] = ordered_json::parse(provenance);
    } catch (const ordered_json::parse_error& e) {
        throw Error(ErrorKind::Parse, "provenance", e.what());
    }
}

std::string csv_preamble(std::string_view provenance) {
    if (provenance.empty()) {
        return {};
    }
    return "# " + ordered_json::parse(provenance).dump() + "\n";
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

ordered_json metrics_object(const MetricReport& r, std::string_view flow_name) {
    return {{"flow", flow_name},        {"N", r.dialogues},
            {"total_utterances", r.total_utterances},
            {"avg_length", r.avg_length}, {"complexity", r.complexity},
            {"nc", r.nc},               {"mean_fudge", r.mean_fudge},
            {"std_fudge", r.std_fudge}, {"nf", r.nf},
            {"ff1", r.ff1}};
}

struct Row {
    std::string conversation;
    std::string intent;
    std::string operation;
    std::string node;
    double step_cost;
    double cumulative;
};

std::vector<Row> alignment_rows(const AlignmentTrace& trace, const Dialogue& dialogue, const FlowGraph& graph,
                                const BucketSet& buckets) {
    std::vector<Row> rows;
    for (const AlignmentStep& s : trace.steps) {
        Row row;
        if (s.turn_index) {
            const Utterance& u = dialogue.turns[*s.turn_index];
            row.conversation = std::string(u.actor == Actor::User ? "u. " : "a. ") + u.text;
        }
        if (s.node_id) {
            row.node = *s.node_id;
            const auto& bucket_id = graph.node(*graph.index_of(*s.node_id)).bucket_id;
            row.intent = buckets.at(*bucket_id).name;
        } else if (s.turn_index) {
            row.intent = dialogue.turns[*s.turn_index].text;
        }
        row.operation = std::string(to_string(s.op));
        row.step_cost = s.step_cost;
        row.cumulative = s.cumulative_cost;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string clip(const std::string& text, std::size_t width) {
    if (text.size() <= width) {
        return text;
    }
    return text.substr(0, width - 3) + "...";
}

} // namespace

std::string metric_report_json(const MetricReport& report, std::string_view flow_name, std::string_view provenance,
                               bool include_per_dialogue) {
    ordered_json doc;
    attach(doc, provenance);
    doc["metrics"] = metrics_object(report, flow_name);
    if (include_per_dialogue) {
        ordered_json per = ordered_json::array();
        for (const auto& [id, value] : report.per_dialogue) {
            per.push_back({{"id", id}, {"fudge", value}});
        }
        doc["per_dialogue"] = std::move(per);
    }
    return doc.dump(2) + "\n";
}

std::string metric_report_csv(const MetricReport& r, std::string_view flow_name, std::string_view provenance) {
    std::string out = csv_preamble(provenance);
    out += "flow,N,complexity,nc,mean_fudge,std_fudge,nf,ff1\n";
    out += csv_field(flow_name) + "," + std::to_string(r.dialogues) + "," + std::to_string(r.complexity) + "," +
           num(r.nc) + "," + num(r.mean_fudge) + "," + num(r.std_fudge) + "," + num(r.nf) + "," + num(r.ff1) + "\n";
    return out;
}

std::string metric_report_table(const MetricReport& r, std::string_view flow_name) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "flow        %s\n"
                  "dialogues   %zu (%zu utterances, avg length %.3f)\n"
                  "complexity  %zu nodes\n"
                  "FuDGE       %.4f +- %.4f\n"
                  "nc          %.4f\n"
                  "nf          %.4f\n"
                  "FF1         %.4f\n",
                  std::string(flow_name).c_str(), r.dialogues, r.total_utterances, r.avg_length, r.complexity,
                  r.mean_fudge, r.std_fudge, r.nc, r.nf, r.ff1);
    return buf;
}

std::string alignment_json(const AlignmentTrace& trace, const Dialogue& dialogue, const FlowGraph& graph,
                           const BucketSet& buckets, std::string_view provenance) {
    ordered_json doc;
    attach(doc, provenance);
    doc["dialogue"] = dialogue.id;
    doc["total"] = trace.total;
    doc["best_path"] = trace.best_path.node_ids;
    doc["path_length"] = trace.path_length();
    ordered_json steps = ordered_json::array();
    const auto rows = alignment_rows(trace, dialogue, graph, buckets);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const AlignmentStep& s = trace.steps[i];
        ordered_json step = {{"operation", rows[i].operation}};
        step["node"] = s.node_id ? ordered_json(*s.node_id) : ordered_json(nullptr);
        step["turn"] = s.turn_index ? ordered_json(*s.turn_index) : ordered_json(nullptr);
        step["conversation"] = rows[i].conversation;
        step["intent"] = rows[i].intent;
        step["step_cost"] = s.step_cost;
        step["cumulative_cost"] = s.cumulative_cost;
        steps.push_back(std::move(step));
    }
    doc["steps"] = std::move(steps);
    return doc.dump(2) + "\n";
}

std::string alignment_table(const AlignmentTrace& trace, const Dialogue& dialogue, const FlowGraph& graph,
                            const BucketSet& buckets) {
    const auto rows = alignment_rows(trace, dialogue, graph, buckets);
    std::size_t w_conv = 12;
    std::size_t w_intent = 11;
    for (const Row& r : rows) {
        w_conv = std::max(w_conv, std::min<std::size_t>(r.conversation.size(), 60));
        w_intent = std::max(w_intent, std::min<std::size_t>(r.intent.size(), 36));
    }
    std::string out;
    char buf[256];
    auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d) {
        std::snprintf(buf, sizeof buf, "%-*s | %-*s | %-9s | %s\n", static_cast<int>(w_conv), clip(a, 60).c_str(),
                      static_cast<int>(w_intent), clip(b, 36).c_str(), c.c_str(), d.c_str());
        out += buf;
    };
    line("Conversation", "Path intent", "Operation", "Cost");
    out += std::string(w_conv, '-') + "-+-" + std::string(w_intent, '-') + "-+-----------+------\n";
    for (const Row& r : rows) {
        line(r.conversation, r.intent, r.operation, num(r.cumulative, 3));
    }
    std::snprintf(buf, sizeof buf, "total %.3f, path length %zu\n", trace.total, trace.path_length());
    out += buf;
    return out;
}

std::string alignment_csv(const AlignmentTrace& trace, const Dialogue& dialogue, const FlowGraph& graph,
                          const BucketSet& buckets, std::string_view provenance) {
    std::string out = csv_preamble(provenance);
    out += "conversation,intent,operation,node,step_cost,cumulative_cost\n";
    for (const Row& r : alignment_rows(trace, dialogue, graph, buckets)) {
        out += csv_field(r.conversation) + "," + csv_field(r.intent) + "," + r.operation + "," + csv_field(r.node) +
               "," + num(r.step_cost) + "," + num(r.cumulative) + "\n";
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& points, std::string_view provenance) {
    std::string out = csv_preamble(provenance);
    out += "k,nc,nf,ff1\n";
    for (const SweepPoint& p : points) {
        out += std::to_string(p.k) + "," + num(p.nc) + "," + num(p.nf) + "," + num(p.ff1) + "\n";
    }
    return out;
}

std::string sweep_json(const std::vector<SweepPoint>& points, std::string_view provenance) {
    ordered_json doc;
    attach(doc, provenance);
    ordered_json rows = ordered_json::array();
    for (const SweepPoint& p : points) {
        rows.push_back({{"k", p.k},
                        {"complexity", p.complexity},
                        {"mean_fudge", p.mean_fudge},
                        {"nc", p.nc},
                        {"nf", p.nf},
                        {"ff1", p.ff1}});
    }
    doc["sweep"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string separation_json(const SeparationReport& report, std::string_view provenance) {
    auto group = [](const GroupStats& g) {
        return ordered_json{{"mean", g.mean}, {"std", g.std}, {"n", g.n}, {"normalized_mean", g.normalized_mean}};
    };
    ordered_json doc;
    attach(doc, provenance);
    doc["positives"] = group(report.positives);
    doc["negatives"] = group(report.negatives);
    doc["margin"] = report.margin;
    doc["normalized_margin"] = report.normalized_margin;
    return doc.dump(2) + "\n";
}

} // namespace fudge
