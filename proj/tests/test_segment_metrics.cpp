#include "diar/segment_metrics.hpp"

#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace diar;
using test::make_annotation;
using test::make_turn;

namespace {

std::vector<Turn> turns_of(std::vector<std::pair<double, double>> spans,
                           const std::string& speaker = "A") {
  std::vector<Turn> turns;
  for (const auto& [onset, offset] : spans) {
    turns.push_back(make_turn("f1", onset, offset - onset, speaker));
  }
  return turns;
}

SpeakerMapping map_of(const Annotation& ref, const Annotation& hyp) {
  return assign(build_overlap_matrix(ref, hyp));
}

}  // namespace

TEST_CASE("adaptive IoU threshold follows the closed form") {
  const IouPolicy policy{0.25, 0.5};
  // (10 - 0.5) / (10 + 0.5)
  CHECK(iou_adaptive_threshold(10.0, 1, policy) == doctest::Approx(9.5 / 10.5));
  // short segment clamps to the lower bound
  CHECK(iou_adaptive_threshold(0.5, 1, policy) == doctest::Approx(0.5));
  // collar 0 demands perfect IoU
  CHECK(iou_adaptive_threshold(3.0, 1, IouPolicy{0.0, 0.5}) == 1.0);
}

TEST_CASE("adaptive IoU threshold is monotone and bounded") {
  const IouPolicy policy{0.25, 0.5};
  double previous = 0.0;
  for (double dur : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 60.0}) {
    const double threshold = iou_adaptive_threshold(dur, 1, policy);
    CHECK(threshold >= policy.lb);
    CHECK(threshold <= 1.0);
    CHECK(threshold >= previous);  // non-decreasing in dur
    previous = threshold;
  }
  previous = 1.0;
  for (int num = 1; num <= 10; ++num) {
    const double threshold = iou_adaptive_threshold(20.0, num, policy);
    CHECK(threshold <= previous);  // non-increasing in num
    previous = threshold;
  }
}

TEST_CASE("build_segment_graph connects positive overlaps only") {
  SUBCASE("one reference covered by two hypothesis pieces") {
    const auto graph = build_segment_graph(turns_of({{0, 10}}),
                                           turns_of({{0, 5}, {5, 9.8}}));
    CHECK(graph.edges == std::vector<std::pair<int, int>>{{0, 0}, {0, 1}});
  }
  SUBCASE("disjoint segments stay isolated") {
    const auto graph = build_segment_graph(turns_of({{0, 1}}), turns_of({{2, 3}}));
    CHECK(graph.edges.empty());
    CHECK(graph.ref_nodes.size() == 1);
    CHECK(graph.hyp_nodes.size() == 1);
  }
  SUBCASE("abutting segments share no edge") {
    const auto graph = build_segment_graph(turns_of({{0, 1}}), turns_of({{1, 2}}));
    CHECK(graph.edges.empty());
  }
  SUBCASE("empty hypothesis leaves isolated reference nodes") {
    const auto graph = build_segment_graph(turns_of({{0, 1}, {2, 3}}), {});
    CHECK(graph.edges.empty());
    CHECK(graph.ref_nodes.size() == 2);
  }
}

TEST_CASE("connected_components") {
  SUBCASE("fan-out forms one component") {
    const auto graph = build_segment_graph(turns_of({{0, 10}}),
                                           turns_of({{0, 5}, {5, 9.8}}));
    const auto components = connected_components(graph);
    REQUIRE(components.size() == 1);
    CHECK(components[0].ref_indices == std::vector<int>{0});
    CHECK(components[0].hyp_indices == std::vector<int>{0, 1});
  }
  SUBCASE("no edges, singleton components") {
    const auto graph = build_segment_graph(turns_of({{0, 1}, {2, 3}}), {});
    CHECK(connected_components(graph).size() == 2);
  }
  SUBCASE("chain through a bridging hypothesis") {
    // r0=[0,2) - h0=[1,4) - r1=[3,5): one component {r0, r1} x {h0}
    const auto graph = build_segment_graph(turns_of({{0, 2}, {3, 5}}), turns_of({{1, 4}}));
    const auto components = connected_components(graph);
    REQUIRE(components.size() == 1);
    CHECK(components[0].ref_indices == std::vector<int>{0, 1});
    CHECK(components[0].hyp_indices == std::vector<int>{0});
  }
}

TEST_CASE("judge_component applies the adaptive threshold to the union IoU") {
  const IouPolicy policy{0.25, 0.5};

  SUBCASE("near-perfect single pair matches") {
    const auto graph = build_segment_graph(turns_of({{0, 10}}), turns_of({{0, 9.8}}));
    const auto components = connected_components(graph);
    REQUIRE(components.size() == 1);
    const SubgraphVerdict verdict = judge_component(graph, components[0], policy);
    CHECK(verdict.iou == doctest::Approx(0.98));
    CHECK(verdict.threshold == doctest::Approx(9.5 / 10.5));
    CHECK(verdict.matched);
    CHECK(verdict.error_segments == 0);
  }
  SUBCASE("splitting the hypothesis does not change the verdict") {
    const auto graph = build_segment_graph(turns_of({{0, 10}}),
                                           turns_of({{0, 5}, {5, 9.8}}));
    const auto components = connected_components(graph);
    REQUIRE(components.size() == 1);
    const SubgraphVerdict verdict = judge_component(graph, components[0], policy);
    CHECK(verdict.iou == doctest::Approx(0.98));
    CHECK(verdict.matched);
  }
  SUBCASE("isolated reference node is an error") {
    const auto graph = build_segment_graph(turns_of({{0, 1}}), {});
    const auto components = connected_components(graph);
    REQUIRE(components.size() == 1);
    const SubgraphVerdict verdict = judge_component(graph, components[0], policy);
    CHECK(verdict.iou == 0.0);
    CHECK(!verdict.matched);
    CHECK(verdict.error_segments == 1);
  }
}

TEST_CASE("speaker_segment_error") {
  const IouPolicy policy{0.25, 0.5};

  SUBCASE("perfect hypothesis") {
    const auto ref = turns_of({{0, 2}, {5, 9}, {12, 13}});
    const auto counts = speaker_segment_error(ref, ref, policy);
    CHECK(counts.error_segs == 0);
    CHECK(counts.ref_segs == 3);
  }
  SUBCASE("empty hypothesis errs every segment") {
    const auto counts = speaker_segment_error(turns_of({{0, 2}, {5, 9}, {12, 13}}), {},
                                              policy);
    CHECK(counts.error_segs == 3);
    CHECK(counts.ref_segs == 3);
  }
  SUBCASE("long matched, short isolated") {
    const auto counts = speaker_segment_error(turns_of({{0, 10}, {20, 20.5}}),
                                              turns_of({{0, 9.8}}), policy);
    CHECK(counts.error_segs == 1);
    CHECK(counts.ref_segs == 2);
  }
  SUBCASE("component partition covers every reference segment") {
    std::mt19937_64 rng(6060);
    for (int trial = 0; trial < 100; ++trial) {
      const Annotation ref = test::random_annotation(rng, "f", 1, 10);
      const Annotation hyp = test::random_annotation(rng, "f", 1, 10);
      const auto& ref_turns = ref.turns_by_speaker.begin()->second;
      const auto& hyp_turns = hyp.turns_by_speaker.begin()->second;
      const auto graph = build_segment_graph(ref_turns, hyp_turns);
      int total_ref = 0;
      for (const auto& component : connected_components(graph)) {
        total_ref += static_cast<int>(component.ref_indices.size());
      }
      CHECK(total_ref == static_cast<int>(ref_turns.size()));
      const auto counts = speaker_segment_error(ref_turns, hyp_turns, policy);
      CHECK(counts.error_segs >= 0);
      CHECK(counts.error_segs <= counts.ref_segs);
    }
  }
}

TEST_CASE("cder reproduces the gap-spanning merge bias") {
  SUBCASE("perfect hypothesis") {
    const Annotation ref = make_annotation(
        "f1", {make_turn("f1", 0, 1, "A"), make_turn("f1", 9, 1, "A")});
    CHECK(cder(ref, ref, map_of(ref, ref)) == 0.0);
  }
  SUBCASE("long merged span fails the fixed IoU while SER sees one of two") {
    const Annotation ref = make_annotation(
        "f1", {make_turn("f1", 0, 1, "A"), make_turn("f1", 9, 1, "A")});
    const Annotation hyp = make_annotation("f1", {make_turn("f1", 0, 1, "A")});
    const SpeakerMapping mapping = map_of(ref, hyp);
    // ref merges to [0,10); hypothesis span [0,1): IoU 0.1 < 0.5.
    CHECK(cder(ref, hyp, mapping) == 1.0);
    const auto counts = speaker_segment_error(ref.turns_by_speaker.at("A"),
                                              hyp.turns_by_speaker.at("A"),
                                              IouPolicy{0.25, 0.5});
    CHECK(counts.error_segs == 1);
    CHECK(counts.ref_segs == 2);
  }
  SUBCASE("empty hypothesis") {
    const Annotation ref = make_annotation("f1", {make_turn("f1", 0, 1, "A")});
    Annotation hyp;
    hyp.file_id = "f1";
    CHECK(cder(ref, hyp, map_of(ref, hyp)) == 1.0);
  }
  SUBCASE("an intervening speaker breaks the merge run") {
    const Annotation ref = make_annotation(
        "f1", {make_turn("f1", 0, 1, "A"), make_turn("f1", 4, 1, "B"),
               make_turn("f1", 9, 1, "A")});
    const Annotation hyp = make_annotation(
        "f1", {make_turn("f1", 0, 1, "A"), make_turn("f1", 4, 1, "B")});
    const CderBreakdown breakdown = cder_breakdown(ref, hyp, map_of(ref, hyp), 0.5);
    // A's two segments stay separate spans; only the second A span errs.
    CHECK(breakdown.ref_spans == 3);
    CHECK(breakdown.error_spans == 1);
  }
  SUBCASE("max_gap variant keeps distant segments apart") {
    const Annotation ref = make_annotation(
        "f1", {make_turn("f1", 0, 1, "A"), make_turn("f1", 9, 1, "A")});
    const Annotation hyp = make_annotation("f1", {make_turn("f1", 0, 1, "A")});
    const CderBreakdown breakdown =
        cder_breakdown(ref, hyp, map_of(ref, hyp), 0.5, /*max_gap=*/1.0);
    CHECK(breakdown.ref_spans == 2);
    CHECK(breakdown.error_spans == 1);
    CHECK(breakdown.cder == 0.5);
  }
}

TEST_CASE("hypothesis split invariance for segment verdicts") {
  // Splitting a hypothesis segment at a point inside an overlapped reference
  // segment preserves components, unions, and therefore every verdict.
  std::mt19937_64 rng(2468);
  const IouPolicy policy{0.25, 0.5};
  for (int trial = 0; trial < 200; ++trial) {
    const Annotation ref_ann = test::random_annotation(rng, "f", 1, 8);
    const auto& ref = ref_ann.turns_by_speaker.begin()->second;
    // Hypothesis: per-segment jitter bounded well below half the duration,
    // plus random drops; each kept segment still contains its midpoint.
    std::vector<Turn> hyp;
    std::bernoulli_distribution drop(0.2);
    for (const Turn& turn : ref) {
      if (drop(rng)) continue;
      Turn jittered = turn;
      const double slack = turn.duration / 5.0;
      const double d_on = test::grid(rng, 0.0, slack);
      const double d_off = test::grid(rng, 0.0, slack);
      jittered.onset = turn.onset + d_on;
      jittered.duration = turn.duration - d_on - d_off;
      if (jittered.duration <= 0.0) continue;
      hyp.push_back(jittered);
    }

    std::vector<Turn> split_hyp;
    for (const Turn& turn : hyp) {
      Turn left = turn;
      left.duration = turn.duration / 2.0;
      Turn right = turn;
      right.onset = turn.onset + left.duration;
      right.duration = turn.offset() - right.onset;
      split_hyp.push_back(left);
      split_hyp.push_back(right);
    }

    const auto base = speaker_segment_error(ref, hyp, policy);
    const auto split = speaker_segment_error(ref, split_hyp, policy);
    CHECK(base.error_segs == split.error_segs);
    CHECK(base.ref_segs == split.ref_segs);
  }
}
