#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "diar/types.hpp"

namespace diar {

// Pairwise speech overlap in seconds between reference speakers (rows) and
// hypothesis speakers (columns). Labels are sorted.
struct OverlapMatrix {
  std::vector<std::string> ref_speakers;
  std::vector<std::string> hyp_speakers;
  std::vector<double> cells;  // row-major, ref_speakers.size() x hyp_speakers.size()

  std::size_t num_ref() const { return ref_speakers.size(); }
  std::size_t num_hyp() const { return hyp_speakers.size(); }
  double at(std::size_t ref, std::size_t hyp) const {
    return cells[ref * hyp_speakers.size() + hyp];
  }
};

// Result of optimal one-to-one speaker assignment. Reference speakers left
// without a partner are later scored against an empty hypothesis; hypothesis
// speakers left without a partner are false-alarm speakers.
struct SpeakerMapping {
  std::vector<std::pair<std::string, std::string>> matched;  // (ref, hyp), sorted by ref
  std::vector<std::string> ref_unmatched;
  std::vector<std::string> hyp_false_alarm;
  double total_overlap = 0.0;  // summed overlap over matched pairs

  // Matched hypothesis speaker for a reference speaker, or nullptr.
  const std::string* hyp_for(const std::string& ref_speaker) const;
};

OverlapMatrix build_overlap_matrix(const Annotation& ref, const Annotation& hyp);

// Maximizes total overlap over all one-to-one assignments (Hungarian). A
// matched pair with exactly zero overlap is demoted afterwards: its
// hypothesis speaker becomes a false-alarm speaker and its reference speaker
// goes unmatched, so a zero-benefit pairing never hides a false alarm.
SpeakerMapping assign(const OverlapMatrix& matrix);

// Exhaustive oracle with the same objective and demotion rule. Requires the
// enumeration to stay small (throws std::invalid_argument otherwise).
SpeakerMapping assign_bruteforce(const OverlapMatrix& matrix);

}  // namespace diar
