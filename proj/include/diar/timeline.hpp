#pragma once

#include <span>
#include <vector>

#include "diar/types.hpp"

namespace diar {

// Comparison tolerance for coalescing nearly-abutting intervals. RTTM files
// carry centisecond-scale times, so this is far below input precision.
inline constexpr double kTimeTolerance = 1e-9;

struct Interval {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
};

bool operator==(const Interval& a, const Interval& b);

// A set of points on the time axis, stored as sorted, pairwise-disjoint
// half-open [start, end) intervals. Abutting intervals are coalesced, so the
// representation of a given point set is canonical.
class Timeline {
 public:
  Timeline() = default;
  explicit Timeline(std::vector<Interval> intervals);

  static Timeline from_turns(std::span<const Turn> turns);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  std::size_t size() const { return intervals_.size(); }

  double total_duration() const;

  void add(double start, double end);

 private:
  void normalize();

  std::vector<Interval> intervals_;  // sorted, disjoint, coalesced
};

bool operator==(const Timeline& a, const Timeline& b);

Timeline unite(const Timeline& a, const Timeline& b);
Timeline intersect(const Timeline& a, const Timeline& b);
Timeline subtract(const Timeline& a, const Timeline& b);

// total_duration(intersect(a, b)) without building the intersection.
double overlap_duration(const Timeline& a, const Timeline& b);

// The region excluded from DER scoring for a given boundary collar: the
// union over all reference turn boundaries b of [b - collar, b + collar).
// A turn shorter than two collars disappears entirely inside the exclusion.
// collar = 0 yields an empty exclusion.
Timeline collar_exclusion(const Annotation& ref, double collar);

// The annotation's speech region for one speaker, coalesced.
Timeline speaker_timeline(const Annotation& annotation, const std::string& speaker);

}  // namespace diar
