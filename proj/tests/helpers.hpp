#pragma once

#include <random>
#include <string>
#include <vector>

#include "diar/timeline.hpp"
#include "diar/types.hpp"

namespace diar::test {

inline Turn make_turn(const std::string& file_id, double onset, double duration,
                      const std::string& speaker, int channel = 1) {
  Turn turn;
  turn.file_id = file_id;
  turn.channel = channel;
  turn.onset = onset;
  turn.duration = duration;
  turn.speaker = speaker;
  return turn;
}

inline Annotation make_annotation(const std::string& file_id,
                                  const std::vector<Turn>& turns) {
  Annotation annotation;
  annotation.file_id = file_id;
  for (const Turn& turn : turns) {
    annotation.add_turn(turn);
  }
  return annotation;
}

// Times on a 2^-10 s grid: sums/differences of grid values are exact in
// double precision, so tests can assert bit-level identities.
constexpr double kGridStep = 1.0 / 1024.0;

inline double grid(std::mt19937_64& rng, double lo, double hi) {
  const long lo_units = std::lround(lo * 1024.0);
  const long hi_units = std::lround(hi * 1024.0);
  std::uniform_int_distribution<long> dist(lo_units, hi_units);
  return dist(rng) * kGridStep;
}

inline Timeline random_timeline(std::mt19937_64& rng, int max_intervals = 6) {
  std::uniform_int_distribution<int> count(0, max_intervals);
  std::vector<Interval> intervals;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const double start = grid(rng, 0.0, 30.0);
    const double len = grid(rng, kGridStep, 5.0);
    intervals.push_back({start, start + len});
  }
  return Timeline(std::move(intervals));
}

// A random multi-speaker annotation on the grid; speakers lay out segments
// left to right with random gaps, so same-speaker turns never overlap.
inline Annotation random_annotation(std::mt19937_64& rng, const std::string& file_id,
                                    int max_speakers = 4, int max_segments = 8) {
  std::uniform_int_distribution<int> speaker_count(1, max_speakers);
  std::uniform_int_distribution<int> segment_count(1, max_segments);
  Annotation annotation;
  annotation.file_id = file_id;
  const int speakers = speaker_count(rng);
  for (int s = 0; s < speakers; ++s) {
    const std::string speaker = "spk" + std::to_string(s);
    double cursor = grid(rng, 0.0, 3.0);
    const int segments = segment_count(rng);
    for (int k = 0; k < segments; ++k) {
      const double len = grid(rng, 0.25, 4.0);
      annotation.add_turn(make_turn(file_id, cursor, len, speaker));
      cursor += len + grid(rng, 0.25, 3.0);
    }
  }
  return annotation;
}

inline Annotation shift_annotation(const Annotation& annotation, double delta) {
  Annotation shifted;
  shifted.file_id = annotation.file_id;
  for (const auto& [speaker, turns] : annotation.turns_by_speaker) {
    (void)speaker;
    for (Turn turn : turns) {
      turn.onset += delta;
      shifted.add_turn(turn);
    }
  }
  return shifted;
}

}  // namespace diar::test
