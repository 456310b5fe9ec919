#pragma once

#include <map>
#include <string>
#include <vector>

#include "diar/mapping.hpp"
#include "diar/types.hpp"

namespace diar {

struct DerBreakdown {
  double false_alarm = 0.0;  // seconds
  double missed = 0.0;       // seconds
  double confusion = 0.0;    // seconds
  double ref_total = 0.0;    // seconds
  double der = 0.0;          // (fa + missed + confusion) / ref_total
};

struct JerBreakdown {
  std::map<std::string, double> per_speaker;  // reference speaker -> [0, 1]
  double jer = 0.0;                           // mean over reference speakers
};

// Diarization error rate with md-eval semantics: at every instant the
// active reference speakers are compared against all active hypothesis
// speakers as multisets; the surplus on either side accrues as missed or
// false alarm, and overlap not explained by the optimal mapping accrues as
// confusion. Overlapped speech is fully counted. Evaluation is restricted
// to `regions` (when given) minus the collar exclusion around reference
// boundaries. ref_total is the scored reference speaker time, so it counts
// overlapping speakers multiply.
DerBreakdown der(const Annotation& ref, const Annotation& hyp, const SpeakerMapping& mapping,
                 double collar = 0.0, const ScoringRegion* regions = nullptr,
                 std::vector<std::string>* warnings = nullptr);

// Jaccard error rate: per matched speaker, (false alarm + missed) over the
// union of reference and hypothesis speech; 1 for unmatched reference
// speakers. False-alarm hypothesis speakers carry no error here.
JerBreakdown jer(const Annotation& ref, const Annotation& hyp, const SpeakerMapping& mapping,
                 std::vector<std::string>* warnings = nullptr);

}  // namespace diar
