#include "diar/timeline.hpp"

#include <algorithm>
#include <utility>

namespace diar {

bool operator==(const Interval& a, const Interval& b) {
  return a.start == b.start && a.end == b.end;
}

Timeline::Timeline(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  normalize();
}

Timeline Timeline::from_turns(std::span<const Turn> turns) {
  std::vector<Interval> intervals;
  intervals.reserve(turns.size());
  for (const Turn& turn : turns) {
    intervals.push_back({turn.onset, turn.offset()});
  }
  return Timeline(std::move(intervals));
}

double Timeline::total_duration() const {
  double total = 0.0;
  for (const Interval& iv : intervals_) {
    total += iv.end - iv.start;
  }
  return total;
}

void Timeline::add(double start, double end) {
  intervals_.push_back({start, end});
  normalize();
}

void Timeline::normalize() {
  std::erase_if(intervals_, [](const Interval& iv) { return !(iv.end - iv.start > 0.0); });
  std::sort(intervals_.begin(), intervals_.end(), [](const Interval& a, const Interval& b) {
    return a.start < b.start || (a.start == b.start && a.end < b.end);
  });
  std::vector<Interval> merged;
  merged.reserve(intervals_.size());
  for (const Interval& iv : intervals_) {
    if (!merged.empty() && iv.start <= merged.back().end + kTimeTolerance) {
      merged.back().end = std::max(merged.back().end, iv.end);
    } else {
      merged.push_back(iv);
    }
  }
  intervals_ = std::move(merged);
}

bool operator==(const Timeline& a, const Timeline& b) {
  return a.intervals() == b.intervals();
}

Timeline unite(const Timeline& a, const Timeline& b) {
  std::vector<Interval> intervals;
  intervals.reserve(a.size() + b.size());
  intervals.insert(intervals.end(), a.intervals().begin(), a.intervals().end());
  intervals.insert(intervals.end(), b.intervals().begin(), b.intervals().end());
  return Timeline(std::move(intervals));
}

Timeline intersect(const Timeline& a, const Timeline& b) {
  std::vector<Interval> intervals;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const Interval& x = a.intervals()[i];
    const Interval& y = b.intervals()[j];
    const double start = std::max(x.start, y.start);
    const double end = std::min(x.end, y.end);
    if (end - start > 0.0) {
      intervals.push_back({start, end});
    }
    if (x.end < y.end) {
      ++i;
    } else {
      ++j;
    }
  }
  return Timeline(std::move(intervals));
}

Timeline subtract(const Timeline& a, const Timeline& b) {
  std::vector<Interval> intervals;
  std::size_t j = 0;
  for (const Interval& x : a.intervals()) {
    double cursor = x.start;
    while (j < b.size() && b.intervals()[j].end <= cursor) {
      ++j;
    }
    std::size_t k = j;
    while (k < b.size() && b.intervals()[k].start < x.end) {
      const Interval& y = b.intervals()[k];
      if (y.start > cursor) {
        intervals.push_back({cursor, y.start});
      }
      cursor = std::max(cursor, y.end);
      if (cursor >= x.end) {
        break;
      }
      ++k;
    }
    if (x.end > cursor) {
      intervals.push_back({cursor, x.end});
    }
  }
  return Timeline(std::move(intervals));
}

double overlap_duration(const Timeline& a, const Timeline& b) {
  double total = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const Interval& x = a.intervals()[i];
    const Interval& y = b.intervals()[j];
    const double start = std::max(x.start, y.start);
    const double end = std::min(x.end, y.end);
    if (end - start > 0.0) {
      total += end - start;
    }
    if (x.end < y.end) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

Timeline collar_exclusion(const Annotation& ref, double collar) {
  if (!(collar > 0.0)) {
    return Timeline();
  }
  std::vector<Interval> intervals;
  for (const auto& [speaker, turns] : ref.turns_by_speaker) {
    (void)speaker;
    for (const Turn& turn : turns) {
      intervals.push_back({turn.onset - collar, turn.onset + collar});
      intervals.push_back({turn.offset() - collar, turn.offset() + collar});
    }
  }
  return Timeline(std::move(intervals));
}

Timeline speaker_timeline(const Annotation& annotation, const std::string& speaker) {
  auto it = annotation.turns_by_speaker.find(speaker);
  if (it == annotation.turns_by_speaker.end()) {
    return Timeline();
  }
  return Timeline::from_turns(it->second);
}

}  // namespace diar
