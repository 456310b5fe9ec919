#pragma once

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "diar/mapping.hpp"
#include "diar/timeline.hpp"
#include "diar/types.hpp"

namespace diar {

// Parameters of the adaptive IoU threshold.
struct IouPolicy {
  double collar = 0.25;  // seconds, >= 0; tolerated per-boundary offset
  double lb = 0.5;       // lower bound of the threshold, in [0, 1)
};

// max((dur - 2*collar*num) / (dur + 2*collar*num), lb). With collar = 0 the
// ratio is exactly 1, so only perfect matches pass; callers must compare
// with IoU >= threshold so that identical segments still match.
double iou_adaptive_threshold(double dur, int num, const IouPolicy& policy);

// Bipartite graph over the segments of one matched speaker pair. Nodes are
// the individual segments; an edge connects a reference and a hypothesis
// segment whenever they overlap with strictly positive duration. Gaps are
// never merged.
struct SegmentGraph {
  std::vector<Interval> ref_nodes;
  std::vector<Interval> hyp_nodes;
  std::vector<std::pair<int, int>> edges;  // (ref index, hyp index)
};

SegmentGraph build_segment_graph(std::span<const Turn> ref_turns,
                                 std::span<const Turn> hyp_turns);

struct Component {
  std::vector<int> ref_indices;
  std::vector<int> hyp_indices;
};

// Maximal connected sub-graphs; isolated nodes come out as singletons.
// Ordered by their smallest reference (then hypothesis) node.
std::vector<Component> connected_components(const SegmentGraph& graph);

struct SubgraphVerdict {
  int ref_count = 0;
  int hyp_count = 0;
  double iou = 0.0;
  double threshold = 0.0;
  bool matched = false;
  int error_segments = 0;  // 0 if matched, else ref_count
};

// IoU of the component's reference and hypothesis interval unions against
// the adaptive threshold built from the component's reference duration and
// segment count. A component without hypothesis nodes never matches.
SubgraphVerdict judge_component(const SegmentGraph& graph, const Component& component,
                                const IouPolicy& policy);

struct SegmentErrorCount {
  int error_segs = 0;
  int ref_segs = 0;
};

// Sums judge_component over all components of one matched pair (hypothesis
// possibly empty). Hypothesis-only components contribute nothing.
SegmentErrorCount speaker_segment_error(std::span<const Turn> ref_turns,
                                        std::span<const Turn> hyp_turns,
                                        const IouPolicy& policy,
                                        std::vector<std::string>* warnings = nullptr);

struct CderBreakdown {
  int error_spans = 0;
  int ref_spans = 0;
  double cder = 0.0;
};

inline constexpr double kNoGapLimit = std::numeric_limits<double>::infinity();

// Conversational DER. Runs of chronologically consecutive same-speaker
// segments are first merged into single spans regardless of gap size (the
// merge that biases the metric on long speech intervals); `max_gap` bounds
// the merged gap for the variant study. Merged reference spans are then
// greedily matched to merged hypothesis spans of the mapped speaker by best
// IoU; a reference span with no partner of IoU >= fixed_iou is an error, and
// spans of unmatched reference speakers all count.
CderBreakdown cder_breakdown(const Annotation& ref, const Annotation& hyp,
                             const SpeakerMapping& mapping, double fixed_iou = 0.5,
                             double max_gap = kNoGapLimit,
                             std::vector<std::string>* warnings = nullptr);

double cder(const Annotation& ref, const Annotation& hyp, const SpeakerMapping& mapping,
            double fixed_iou = 0.5);

}  // namespace diar
