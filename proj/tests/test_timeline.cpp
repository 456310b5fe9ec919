#include "diar/timeline.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"

using namespace diar;
using test::make_annotation;
using test::make_turn;
using test::random_timeline;

namespace {

Timeline tl(std::vector<Interval> intervals) { return Timeline(std::move(intervals)); }

}  // namespace

TEST_CASE("union merges overlapping and abutting intervals") {
  CHECK(unite(tl({{0, 2}}), tl({{1, 3}})) == tl({{0, 3}}));
  CHECK(unite(tl({{0, 2}}), tl({{1, 3}})).total_duration() == doctest::Approx(3.0));
  CHECK(unite(tl({{0, 1}}), Timeline()) == tl({{0, 1}}));
  CHECK(unite(tl({{0, 1}}), tl({{1, 2}})) == tl({{0, 2}}));
}

TEST_CASE("intersection") {
  CHECK(intersect(tl({{0, 2}}), tl({{1, 3}})) == tl({{1, 2}}));
  CHECK(intersect(tl({{0, 2}}), tl({{1, 3}})).total_duration() == doctest::Approx(1.0));
  CHECK(intersect(tl({{0, 1}}), tl({{2, 3}})).empty());
  const Timeline a = tl({{0, 1}, {2, 5}});
  CHECK(intersect(a, a) == a);
}

TEST_CASE("subtraction") {
  CHECK(subtract(tl({{0, 10}}), tl({{0, 8}})) == tl({{8, 10}}));
  CHECK(subtract(tl({{0, 10}}), tl({{0, 8}})).total_duration() == doctest::Approx(2.0));
  const Timeline a = tl({{0, 1}, {2, 5}});
  CHECK(subtract(a, a).empty());
  CHECK(subtract(a, Timeline()) == a);
  CHECK(subtract(tl({{0, 10}}), tl({{2, 3}, {5, 6}})) == tl({{0, 2}, {3, 5}, {6, 10}}));
}

TEST_CASE("total duration") {
  CHECK(tl({{0, 1}, {2, 3}}).total_duration() == doctest::Approx(2.0));
  CHECK(Timeline().total_duration() == 0.0);
}

TEST_CASE("canonical form is constructor-order independent") {
  const Timeline a = tl({{3, 4}, {0, 1}, {0.5, 2}});
  const Timeline b = tl({{0.5, 2}, {3, 4}, {0, 1}});
  CHECK(a == b);
  CHECK(a.intervals().size() == 2);
}

TEST_CASE("zero-length intervals are dropped") {
  CHECK(tl({{1, 1}}).empty());
}

TEST_CASE("inclusion-exclusion holds on random grid timelines") {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 500; ++trial) {
    const Timeline a = random_timeline(rng);
    const Timeline b = random_timeline(rng);
    const double lhs = unite(a, b).total_duration() + intersect(a, b).total_duration();
    const double rhs = a.total_duration() + b.total_duration();
    CHECK(std::abs(lhs - rhs) < 1e-9);
    CHECK(overlap_duration(a, b) == intersect(a, b).total_duration());
    CHECK(intersect(subtract(a, b), b).empty());
  }
}

TEST_CASE("set algebra laws on random inputs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Timeline a = random_timeline(rng);
    const Timeline b = random_timeline(rng);
    const Timeline c = random_timeline(rng);
    CHECK(unite(a, b) == unite(b, a));
    CHECK(intersect(a, b) == intersect(b, a));
    CHECK(unite(a, unite(b, c)) == unite(unite(a, b), c));
    CHECK(intersect(a, intersect(b, c)) == intersect(intersect(a, b), c));
    CHECK(unite(a, a) == a);
    CHECK(intersect(a, a) == a);
  }
}

TEST_CASE("collar exclusion") {
  const Annotation ref = make_annotation("f1", {make_turn("f1", 1.0, 2.0, "A")});

  SUBCASE("collar 0 excludes nothing") {
    CHECK(collar_exclusion(ref, 0.0).empty());
  }
  SUBCASE("quarter-second collar brackets both boundaries") {
    // turn [1,3): exclusion [0.75,1.25) u [2.75,3.25)
    CHECK(collar_exclusion(ref, 0.25) == tl({{0.75, 1.25}, {2.75, 3.25}}));
  }
  SUBCASE("turn shorter than two collars is fully excluded") {
    const Annotation short_ref = make_annotation("f1", {make_turn("f1", 1.0, 0.4, "A")});
    const Timeline exclusion = collar_exclusion(short_ref, 0.25);
    const Timeline speech = Timeline::from_turns(short_ref.turns_by_speaker.at("A"));
    CHECK(subtract(speech, exclusion).empty());
  }
}

TEST_CASE("from_turns coalesces per speaker") {
  const std::vector<Turn> turns = {make_turn("f1", 0.0, 2.0, "A"),
                                   make_turn("f1", 1.0, 2.0, "A")};
  CHECK(Timeline::from_turns(turns) == tl({{0, 3}}));
}
