#include "diar/segment_metrics.hpp"

#include <algorithm>
#include <numeric>

namespace diar {

namespace {

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
    }
  }
};

// Consecutive same-speaker runs in the chronological stream of all turns,
// each collapsed to its [first onset, last offset) span. `max_gap` breaks a
// run when the silence inside it grows beyond the bound.
std::map<std::string, std::vector<Interval>> merge_speaker_runs(const Annotation& annotation,
                                                                double max_gap) {
  std::vector<const Turn*> stream;
  stream.reserve(annotation.num_turns());
  for (const auto& [speaker, turns] : annotation.turns_by_speaker) {
    (void)speaker;
    for (const Turn& turn : turns) {
      stream.push_back(&turn);
    }
  }
  std::sort(stream.begin(), stream.end(), [](const Turn* a, const Turn* b) {
    if (a->onset != b->onset) return a->onset < b->onset;
    if (a->duration != b->duration) return a->duration < b->duration;
    return a->speaker < b->speaker;
  });

  std::map<std::string, std::vector<Interval>> spans;
  const Turn* run_first = nullptr;
  double run_end = 0.0;
  auto flush = [&]() {
    if (run_first != nullptr) {
      spans[run_first->speaker].push_back({run_first->onset, run_end});
    }
  };
  for (const Turn* turn : stream) {
    const bool same_run = run_first != nullptr && turn->speaker == run_first->speaker &&
                          turn->onset - run_end <= max_gap;
    if (same_run) {
      run_end = std::max(run_end, turn->offset());
    } else {
      flush();
      run_first = turn;
      run_end = turn->offset();
    }
  }
  flush();
  return spans;
}

double span_iou(const Interval& a, const Interval& b) {
  const double inter = std::min(a.end, b.end) - std::max(a.start, b.start);
  if (!(inter > 0.0)) {
    return 0.0;
  }
  const double uni = std::max(a.end, b.end) - std::min(a.start, b.start);
  return inter / uni;
}

}  // namespace

double iou_adaptive_threshold(double dur, int num, const IouPolicy& policy) {
  const double offset = 2.0 * policy.collar * static_cast<double>(num);
  const double denom = dur + offset;
  const double ratio = denom > 0.0 ? (dur - offset) / denom : 0.0;
  return std::max(ratio, policy.lb);
}

SegmentGraph build_segment_graph(std::span<const Turn> ref_turns,
                                 std::span<const Turn> hyp_turns) {
  SegmentGraph graph;
  graph.ref_nodes.reserve(ref_turns.size());
  for (const Turn& turn : ref_turns) {
    graph.ref_nodes.push_back({turn.onset, turn.offset()});
  }
  graph.hyp_nodes.reserve(hyp_turns.size());
  for (const Turn& turn : hyp_turns) {
    graph.hyp_nodes.push_back({turn.onset, turn.offset()});
  }

  // Sweep both node lists by onset; whoever opens later scans the other
  // side's still-open intervals, so each overlapping pair is found once.
  std::vector<int> ref_order(graph.ref_nodes.size());
  std::iota(ref_order.begin(), ref_order.end(), 0);
  std::sort(ref_order.begin(), ref_order.end(), [&](int a, int b) {
    return graph.ref_nodes[a].start < graph.ref_nodes[b].start ||
           (graph.ref_nodes[a].start == graph.ref_nodes[b].start && a < b);
  });
  std::vector<int> hyp_order(graph.hyp_nodes.size());
  std::iota(hyp_order.begin(), hyp_order.end(), 0);
  std::sort(hyp_order.begin(), hyp_order.end(), [&](int a, int b) {
    return graph.hyp_nodes[a].start < graph.hyp_nodes[b].start ||
           (graph.hyp_nodes[a].start == graph.hyp_nodes[b].start && a < b);
  });

  std::vector<int> open_ref;
  std::vector<int> open_hyp;
  auto scan = [](std::vector<int>& open, const std::vector<Interval>& nodes, double time,
                 auto&& emit) {
    std::size_t keep = 0;
    for (int idx : open) {
      if (nodes[idx].end > time) {
        open[keep++] = idx;
        emit(idx);
      }
    }
    open.resize(keep);
  };

  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ref_order.size() || j < hyp_order.size()) {
    const bool take_ref =
        j >= hyp_order.size() ||
        (i < ref_order.size() &&
         graph.ref_nodes[ref_order[i]].start <= graph.hyp_nodes[hyp_order[j]].start);
    if (take_ref) {
      const int r = ref_order[i++];
      scan(open_hyp, graph.hyp_nodes, graph.ref_nodes[r].start,
           [&](int h) { graph.edges.emplace_back(r, h); });
      open_ref.push_back(r);
    } else {
      const int h = hyp_order[j++];
      scan(open_ref, graph.ref_nodes, graph.hyp_nodes[h].start,
           [&](int r) { graph.edges.emplace_back(r, h); });
      open_hyp.push_back(h);
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end());
  return graph;
}

std::vector<Component> connected_components(const SegmentGraph& graph) {
  const int num_ref = static_cast<int>(graph.ref_nodes.size());
  const int num_hyp = static_cast<int>(graph.hyp_nodes.size());
  UnionFind uf(num_ref + num_hyp);
  for (const auto& [r, h] : graph.edges) {
    uf.merge(r, num_ref + h);
  }

  std::map<int, Component> by_root;
  for (int r = 0; r < num_ref; ++r) {
    by_root[uf.find(r)].ref_indices.push_back(r);
  }
  for (int h = 0; h < num_hyp; ++h) {
    by_root[uf.find(num_ref + h)].hyp_indices.push_back(h);
  }
  std::vector<Component> components;
  components.reserve(by_root.size());
  for (auto& [root, component] : by_root) {
    (void)root;
    components.push_back(std::move(component));
  }
  return components;
}

SubgraphVerdict judge_component(const SegmentGraph& graph, const Component& component,
                                const IouPolicy& policy) {
  SubgraphVerdict verdict;
  verdict.ref_count = static_cast<int>(component.ref_indices.size());
  verdict.hyp_count = static_cast<int>(component.hyp_indices.size());

  std::vector<Interval> ref_ivs;
  ref_ivs.reserve(component.ref_indices.size());
  for (int r : component.ref_indices) {
    ref_ivs.push_back(graph.ref_nodes[r]);
  }
  std::vector<Interval> hyp_ivs;
  hyp_ivs.reserve(component.hyp_indices.size());
  for (int h : component.hyp_indices) {
    hyp_ivs.push_back(graph.hyp_nodes[h]);
  }
  const Timeline ref_tl{std::move(ref_ivs)};
  const Timeline hyp_tl{std::move(hyp_ivs)};

  const double inter = overlap_duration(ref_tl, hyp_tl);
  const double uni = unite(ref_tl, hyp_tl).total_duration();
  verdict.iou = uni > 0.0 ? inter / uni : 0.0;
  if (verdict.ref_count > 0) {
    verdict.threshold = iou_adaptive_threshold(ref_tl.total_duration(), verdict.ref_count,
                                               policy);
    verdict.matched = verdict.hyp_count > 0 && verdict.iou >= verdict.threshold;
    verdict.error_segments = verdict.matched ? 0 : verdict.ref_count;
  }
  return verdict;
}

SegmentErrorCount speaker_segment_error(std::span<const Turn> ref_turns,
                                        std::span<const Turn> hyp_turns,
                                        const IouPolicy& policy,
                                        std::vector<std::string>* warnings) {
  const SegmentGraph graph = build_segment_graph(ref_turns, hyp_turns);
  SegmentErrorCount count;
  count.ref_segs = static_cast<int>(ref_turns.size());
  for (const Component& component : connected_components(graph)) {
    count.error_segs += judge_component(graph, component, policy).error_segments;
  }
  if (count.ref_segs == 0 && warnings != nullptr) {
    warnings->push_back("segment error over zero reference segments, ratio is 0");
  }
  return count;
}

CderBreakdown cder_breakdown(const Annotation& ref, const Annotation& hyp,
                             const SpeakerMapping& mapping, double fixed_iou, double max_gap,
                             std::vector<std::string>* warnings) {
  const auto ref_spans = merge_speaker_runs(ref, max_gap);
  const auto hyp_spans = merge_speaker_runs(hyp, max_gap);

  CderBreakdown result;
  for (const auto& [speaker, spans] : ref_spans) {
    result.ref_spans += static_cast<int>(spans.size());

    const std::string* hyp_speaker = mapping.hyp_for(speaker);
    const std::vector<Interval>* candidates = nullptr;
    if (hyp_speaker != nullptr) {
      auto it = hyp_spans.find(*hyp_speaker);
      if (it != hyp_spans.end()) {
        candidates = &it->second;
      }
    }
    if (candidates == nullptr) {
      result.error_spans += static_cast<int>(spans.size());
      continue;
    }

    // Greedy one-to-one matching by descending IoU.
    struct Candidate {
      double iou;
      int ref_idx;
      int hyp_idx;
    };
    std::vector<Candidate> pairs;
    for (std::size_t a = 0; a < spans.size(); ++a) {
      for (std::size_t b = 0; b < candidates->size(); ++b) {
        const double iou = span_iou(spans[a], (*candidates)[b]);
        if (iou >= fixed_iou) {
          pairs.push_back({iou, static_cast<int>(a), static_cast<int>(b)});
        }
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Candidate& x, const Candidate& y) {
      if (x.iou != y.iou) return x.iou > y.iou;
      if (x.ref_idx != y.ref_idx) return x.ref_idx < y.ref_idx;
      return x.hyp_idx < y.hyp_idx;
    });
    std::vector<char> ref_taken(spans.size(), 0);
    std::vector<char> hyp_taken(candidates->size(), 0);
    int matched = 0;
    for (const Candidate& c : pairs) {
      if (!ref_taken[c.ref_idx] && !hyp_taken[c.hyp_idx]) {
        ref_taken[c.ref_idx] = 1;
        hyp_taken[c.hyp_idx] = 1;
        ++matched;
      }
    }
    result.error_spans += static_cast<int>(spans.size()) - matched;
  }

  if (result.ref_spans > 0) {
    result.cder = static_cast<double>(result.error_spans) / result.ref_spans;
  } else {
    result.cder = 0.0;
    if (warnings != nullptr && !hyp.empty()) {
      warnings->push_back(ref.file_id + ": CDER over zero reference spans, using 0");
    }
  }
  return result;
}

double cder(const Annotation& ref, const Annotation& hyp, const SpeakerMapping& mapping,
            double fixed_iou) {
  return cder_breakdown(ref, hyp, mapping, fixed_iou).cder;
}

}  // namespace diar
