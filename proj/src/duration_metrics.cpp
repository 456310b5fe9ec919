#include "diar/duration_metrics.hpp"

#include <algorithm>
#include <limits>

#include "diar/timeline.hpp"

namespace diar {

namespace {

struct Event {
  double time;
  bool is_ref;
  int index;
  int delta;  // +1 open, -1 close
};

Timeline restricted(Timeline tl, const ScoringRegion* regions, const Timeline& exclusion) {
  if (regions != nullptr) {
    std::vector<Interval> ivs;
    ivs.reserve(regions->intervals.size());
    for (const auto& [start, end] : regions->intervals) {
      ivs.push_back({start, end});
    }
    tl = intersect(tl, Timeline(std::move(ivs)));
  }
  if (!exclusion.empty()) {
    tl = subtract(tl, exclusion);
  }
  return tl;
}

}  // namespace

DerBreakdown der(const Annotation& ref, const Annotation& hyp, const SpeakerMapping& mapping,
                 double collar, const ScoringRegion* regions,
                 std::vector<std::string>* warnings) {
  const Timeline exclusion = collar_exclusion(ref, collar);

  const std::vector<std::string> ref_speakers = ref.speakers();
  const std::vector<std::string> hyp_speakers = hyp.speakers();

  DerBreakdown result;
  std::vector<Timeline> ref_tls(ref_speakers.size());
  for (std::size_t i = 0; i < ref_speakers.size(); ++i) {
    ref_tls[i] = restricted(speaker_timeline(ref, ref_speakers[i]), regions, exclusion);
    result.ref_total += ref_tls[i].total_duration();
  }
  std::vector<Timeline> hyp_tls(hyp_speakers.size());
  for (std::size_t j = 0; j < hyp_speakers.size(); ++j) {
    hyp_tls[j] = restricted(speaker_timeline(hyp, hyp_speakers[j]), regions, exclusion);
  }

  // partner_of_hyp[j] = index of the mapped reference speaker, or -1.
  std::vector<int> partner_of_hyp(hyp_speakers.size(), -1);
  std::vector<int> partner_of_ref(ref_speakers.size(), -1);
  for (const auto& [ref_name, hyp_name] : mapping.matched) {
    const auto ri = std::lower_bound(ref_speakers.begin(), ref_speakers.end(), ref_name);
    const auto hj = std::lower_bound(hyp_speakers.begin(), hyp_speakers.end(), hyp_name);
    if (ri != ref_speakers.end() && *ri == ref_name && hj != hyp_speakers.end() &&
        *hj == hyp_name) {
      const int i = static_cast<int>(ri - ref_speakers.begin());
      const int j = static_cast<int>(hj - hyp_speakers.begin());
      partner_of_ref[i] = j;
      partner_of_hyp[j] = i;
    }
  }

  std::vector<Event> events;
  for (std::size_t i = 0; i < ref_tls.size(); ++i) {
    for (const Interval& iv : ref_tls[i].intervals()) {
      events.push_back({iv.start, true, static_cast<int>(i), +1});
      events.push_back({iv.end, true, static_cast<int>(i), -1});
    }
  }
  for (std::size_t j = 0; j < hyp_tls.size(); ++j) {
    for (const Interval& iv : hyp_tls[j].intervals()) {
      events.push_back({iv.start, false, static_cast<int>(j), +1});
      events.push_back({iv.end, false, static_cast<int>(j), -1});
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.is_ref != b.is_ref) return a.is_ref;
    if (a.index != b.index) return a.index < b.index;
    return a.delta < b.delta;
  });

  std::vector<char> ref_active(ref_speakers.size(), 0);
  std::vector<char> hyp_active(hyp_speakers.size(), 0);
  int num_ref_active = 0;
  int num_hyp_active = 0;
  int num_correct = 0;  // matched pairs with both sides active

  std::size_t k = 0;
  double prev_time = 0.0;
  while (k < events.size()) {
    const double now = events[k].time;
    if (num_ref_active > 0 || num_hyp_active > 0) {
      const double len = now - prev_time;
      if (len > 0.0) {
        const int surplus_ref = num_ref_active - num_hyp_active;
        if (surplus_ref > 0) {
          result.missed += surplus_ref * len;
        } else if (surplus_ref < 0) {
          result.false_alarm += -surplus_ref * len;
        }
        const int overlap = std::min(num_ref_active, num_hyp_active);
        if (overlap > num_correct) {
          result.confusion += (overlap - num_correct) * len;
        }
      }
    }
    while (k < events.size() && events[k].time == now) {
      const Event& ev = events[k];
      if (ev.is_ref) {
        ref_active[ev.index] += ev.delta;
        num_ref_active += ev.delta;
        const int j = partner_of_ref[ev.index];
        if (j >= 0 && hyp_active[j]) {
          num_correct += ev.delta;
        }
      } else {
        hyp_active[ev.index] += ev.delta;
        num_hyp_active += ev.delta;
        const int i = partner_of_hyp[ev.index];
        if (i >= 0 && ref_active[i]) {
          num_correct += ev.delta;
        }
      }
      ++k;
    }
    prev_time = now;
  }

  const double errors = result.false_alarm + result.missed + result.confusion;
  if (result.ref_total > 0.0) {
    result.der = errors / result.ref_total;
  } else if (errors > 0.0) {
    result.der = std::numeric_limits<double>::infinity();
    if (warnings != nullptr) {
      warnings->push_back(ref.file_id +
                          ": DER undefined (no scored reference speech, errors present)");
    }
  } else {
    result.der = 0.0;
  }
  return result;
}

JerBreakdown jer(const Annotation& ref, const Annotation& hyp, const SpeakerMapping& mapping,
                 std::vector<std::string>* warnings) {
  JerBreakdown result;
  double sum = 0.0;
  std::size_t count = 0;

  for (const auto& [speaker, turns] : ref.turns_by_speaker) {
    const Timeline ref_tl = Timeline::from_turns(turns);
    double value = 1.0;  // unmatched reference speaker: all missed
    const std::string* hyp_speaker = mapping.hyp_for(speaker);
    if (hyp_speaker != nullptr) {
      const Timeline hyp_tl = speaker_timeline(hyp, *hyp_speaker);
      const double fa = subtract(hyp_tl, ref_tl).total_duration();
      const double ms = subtract(ref_tl, hyp_tl).total_duration();
      const double un = unite(ref_tl, hyp_tl).total_duration();
      if (un > 0.0) {
        value = (fa + ms) / un;
      } else {
        value = 0.0;
        if (warnings != nullptr) {
          warnings->push_back(ref.file_id + ": JER undefined for speaker " + speaker +
                              " (empty union), using 0");
        }
      }
      if (!(ref_tl.total_duration() > 0.0) && warnings != nullptr) {
        warnings->push_back(ref.file_id + ": reference speaker " + speaker +
                            " has zero duration");
      }
    }
    result.per_speaker.emplace(speaker, value);
    sum += value;
    ++count;
  }

  if (count > 0) {
    result.jer = sum / static_cast<double>(count);
  } else {
    result.jer = 0.0;
    if (warnings != nullptr && !hyp.empty()) {
      warnings->push_back(ref.file_id + ": JER over zero reference speakers, using 0");
    }
  }
  return result;
}

}  // namespace diar
