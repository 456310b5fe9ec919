#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace diar {

// One labeled speech segment, as carried by an RTTM SPEAKER line.
struct Turn {
  std::string file_id;
  int channel = 1;
  double onset = 0.0;     // seconds, >= 0
  double duration = 0.0;  // seconds, > 0
  std::string speaker;

  double offset() const { return onset + duration; }
};

bool operator==(const Turn& a, const Turn& b);

// All turns of one recording, grouped by speaker. Each speaker's list is
// kept sorted by (onset, duration, channel).
struct Annotation {
  std::string file_id;
  std::map<std::string, std::vector<Turn>> turns_by_speaker;

  // Inserts in sorted position. Adopts the turn's file_id if the annotation
  // is still unnamed; throws std::invalid_argument on a mismatch.
  void add_turn(const Turn& turn);

  std::vector<std::string> speakers() const;
  std::size_t num_turns() const;
  bool empty() const { return turns_by_speaker.empty(); }
};

bool operator==(const Annotation& a, const Annotation& b);

// Time regions of one recording that are eligible for scoring (UEM).
// Intervals are disjoint, sorted, and each satisfies end > start.
struct ScoringRegion {
  std::string file_id;
  std::vector<std::pair<double, double>> intervals;
};

}  // namespace diar
