#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fudge/align.hpp"
#include "fudge/experiments.hpp"
#include "fudge/metrics.hpp"
#include "fudge/model.hpp"

namespace fudge {

// Renderers for every artifact the tool writes. `provenance` is either empty
// or a JSON object (run configuration); it is embedded verbatim under
// "provenance" in JSON outputs and as a leading "# " comment line in CSV.

std::string metric_report_json(const MetricReport& report, std::string_view flow_name, std::string_view provenance,
                               bool include_per_dialogue = true);
/// Columns: flow,N,complexity,nc,mean_fudge,std_fudge,nf,ff1
std::string metric_report_csv(const MetricReport& report, std::string_view flow_name, std::string_view provenance);
std::string metric_report_table(const MetricReport& report, std::string_view flow_name);

std::string alignment_json(const AlignmentTrace& trace, const Dialogue& dialogue, const FlowGraph& graph,
                           const BucketSet& buckets, std::string_view provenance);
/// Conversation | Path intent | Operation | Cost, one row per step.
std::string alignment_table(const AlignmentTrace& trace, const Dialogue& dialogue, const FlowGraph& graph,
                            const BucketSet& buckets);
std::string alignment_csv(const AlignmentTrace& trace, const Dialogue& dialogue, const FlowGraph& graph,
                          const BucketSet& buckets, std::string_view provenance);

/// Header "k,nc,nf,ff1", one row per k.
std::string sweep_csv(const std::vector<SweepPoint>& points, std::string_view provenance);
std::string sweep_json(const std::vector<SweepPoint>& points, std::string_view provenance);

/// {"positives": {"mean","std","n"}, "negatives": {...}, "margin"}
std::string separation_json(const SeparationReport& report, std::string_view provenance);

} // namespace fudge
