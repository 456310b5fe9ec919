#include "diar/rttm.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"

using namespace diar;
using test::make_annotation;
using test::make_turn;

TEST_CASE("parse_rttm maps SPEAKER fields") {
  std::istringstream in("SPEAKER f1 1 0.50 2.00 <NA> <NA> spkA <NA> <NA>\n");
  const auto turns = parse_rttm(in);
  REQUIRE(turns.size() == 1);
  CHECK(turns[0].file_id == "f1");
  CHECK(turns[0].channel == 1);
  CHECK(turns[0].onset == doctest::Approx(0.5));
  CHECK(turns[0].duration == doctest::Approx(2.0));
  CHECK(turns[0].speaker == "spkA");
}

TEST_CASE("parse_rttm skips other record types and blank lines") {
  std::istringstream in(
      "SPKR-INFO f1 1 <NA> <NA> <NA> unknown spkA <NA>\n"
      "\n"
      ";; a comment\n"
      "NON-SPEECH f1 1 0.0 1.0 <NA> <NA> <NA> <NA>\n"
      "SPEAKER f1 1 0.0 1.0 <NA> <NA> spkA <NA>\n");  // 9-field layout
  CHECK(parse_rttm(in).size() == 1);
}

TEST_CASE("parse_rttm rejects malformed SPEAKER lines with line numbers") {
  SUBCASE("empty input") {
    std::istringstream in("");
    CHECK(parse_rttm(in).empty());
  }
  SUBCASE("negative duration") {
    std::istringstream in("SPEAKER f1 1 0.50 -1.0 <NA> <NA> spkA <NA> <NA>\n");
    CHECK_THROWS_WITH_AS(parse_rttm(in, "x.rttm"), "x.rttm:1: non-positive duration",
                         ParseError);
  }
  SUBCASE("zero duration") {
    std::istringstream in("SPEAKER f1 1 0.50 0.0 <NA> <NA> spkA <NA> <NA>\n");
    CHECK_THROWS_AS(parse_rttm(in), ParseError);
  }
  SUBCASE("non-numeric onset, line number reported") {
    std::istringstream in(
        "SPEAKER f1 1 0.0 1.0 <NA> <NA> spkA <NA> <NA>\n"
        "SPEAKER f1 1 abc 1.0 <NA> <NA> spkA <NA> <NA>\n");
    try {
      parse_rttm(in, "y.rttm");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("wrong field count") {
    std::istringstream in("SPEAKER f1 1 0.0\n");
    CHECK_THROWS_AS(parse_rttm(in), ParseError);
  }
  SUBCASE("negative onset") {
    std::istringstream in("SPEAKER f1 1 -0.5 1.0 <NA> <NA> spkA <NA> <NA>\n");
    CHECK_THROWS_AS(parse_rttm(in), ParseError);
  }
  SUBCASE("non-finite times") {
    std::istringstream inf_dur("SPEAKER f1 1 0.0 inf <NA> <NA> spkA <NA> <NA>\n");
    CHECK_THROWS_AS(parse_rttm(inf_dur), ParseError);
    std::istringstream nan_onset("SPEAKER f1 1 nan 1.0 <NA> <NA> spkA <NA> <NA>\n");
    CHECK_THROWS_AS(parse_rttm(nan_onset), ParseError);
  }
  SUBCASE("non-numeric channel") {
    std::istringstream in("SPEAKER f1 <NA> 0.0 1.0 <NA> <NA> spkA <NA> <NA>\n");
    CHECK_THROWS_AS(parse_rttm(in), ParseError);
  }
}

TEST_CASE("whitespace runs and tabs separate fields") {
  std::istringstream in("SPEAKER\tf1  1\t 0.50   2.00 <NA> <NA> spkA <NA> <NA>\n");
  const auto turns = parse_rttm(in);
  REQUIRE(turns.size() == 1);
  CHECK(turns[0].onset == doctest::Approx(0.5));
}

TEST_CASE("group_by_file") {
  SUBCASE("splits by file id") {
    const std::vector<Turn> turns = {make_turn("f1", 0, 1, "A"), make_turn("f2", 0, 1, "B")};
    const auto grouped = group_by_file(turns);
    CHECK(grouped.size() == 2);
    CHECK(grouped.at("f1").num_turns() == 1);
    CHECK(grouped.at("f2").num_turns() == 1);
  }
  SUBCASE("single file") {
    const std::vector<Turn> turns = {make_turn("f1", 0, 1, "A"), make_turn("f1", 2, 1, "B")};
    CHECK(group_by_file(turns).size() == 1);
  }
  SUBCASE("empty input") {
    CHECK(group_by_file(std::vector<Turn>{}).empty());
  }
  SUBCASE("grouping is order insensitive") {
    std::vector<Turn> turns = {make_turn("f1", 3, 1, "A"), make_turn("f1", 0, 1, "B"),
                               make_turn("f1", 1, 0.5, "A"), make_turn("f2", 0, 2, "A")};
    const auto forward = group_by_file(turns);
    std::reverse(turns.begin(), turns.end());
    const auto backward = group_by_file(turns);
    CHECK(forward == backward);
  }
}

TEST_CASE("write_rttm emits fixed-precision SPEAKER lines") {
  const Annotation a = make_annotation("f1", {make_turn("f1", 0.5, 2.0, "spkA")});
  std::ostringstream out;
  write_rttm(a, out);
  CHECK(out.str() == "SPEAKER f1 1 0.500 2.000 <NA> <NA> spkA <NA> <NA>\n");

  std::ostringstream empty;
  write_rttm(Annotation{}, empty);
  CHECK(empty.str().empty());
}

TEST_CASE("rttm round-trip on random millisecond-grid annotations") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> onset_ms(0, 120000);
  std::uniform_int_distribution<int> dur_ms(1, 30000);
  std::uniform_int_distribution<int> speakers(1, 5);
  std::uniform_int_distribution<int> segments(0, 12);

  for (int trial = 0; trial < 100; ++trial) {
    Annotation a;
    a.file_id = "file" + std::to_string(trial);
    const int num_speakers = speakers(rng);
    for (int s = 0; s < num_speakers; ++s) {
      const int n = segments(rng);
      for (int k = 0; k < n; ++k) {
        a.add_turn(make_turn(a.file_id, onset_ms(rng) / 1000.0, dur_ms(rng) / 1000.0,
                             "spk" + std::to_string(s)));
      }
    }
    if (a.empty()) continue;

    std::ostringstream out;
    write_rttm(a, out);
    std::istringstream in(out.str());
    const auto grouped = group_by_file(parse_rttm(in));
    REQUIRE(grouped.size() == 1);
    CHECK(grouped.at(a.file_id) == a);
  }
}

TEST_CASE("parse_uem coalesces regions per file") {
  std::istringstream in(
      "f1 1 0.0 10.0\n"
      "f1 1 8.0 20.0\n"
      "f2 1 5.0 6.0\n");
  const auto regions = parse_uem(in);
  REQUIRE(regions.size() == 2);
  REQUIRE(regions.at("f1").intervals.size() == 1);
  CHECK(regions.at("f1").intervals[0].first == doctest::Approx(0.0));
  CHECK(regions.at("f1").intervals[0].second == doctest::Approx(20.0));

  std::istringstream bad("f1 1 5.0 5.0\n");
  CHECK_THROWS_AS(parse_uem(bad), ParseError);
}

TEST_CASE("duplicate turns are kept and flagged") {
  const Turn t = make_turn("f1", 0.5, 1.0, "A");
  const Annotation a = make_annotation("f1", {t, t});
  CHECK(a.num_turns() == 2);
  const auto warnings = duplicate_turn_warnings(a);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("duplicate") != std::string::npos);
}
