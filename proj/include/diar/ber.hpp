#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "diar/config.hpp"
#include "diar/mapping.hpp"
#include "diar/segment_metrics.hpp"
#include "diar/types.hpp"

namespace diar {

struct EpsPolicy {
  double eps = 1e-6;  // in (0, 1e-3]
};

// 2 / (1/(a + eps) + 1/(b + eps)) - eps. Leans towards the smaller of the
// two errors; exactly 0 when both are 0.
double harmonic_mean_eps(double a, double b, EpsPolicy eps = {});

// Duration, segment, and combined error of one matched speaker pair.
struct SpeakerError {
  std::string speaker;       // reference label
  double e_dur = 0.0;        // (FA + MS) / REF duration
  double e_seg = 0.0;        // error segments / reference segments
  double e_harmonic = 0.0;
};

// `counts_out`, when given, receives the raw segment counts behind e_seg.
SpeakerError speaker_error(const std::string& ref_speaker, std::span<const Turn> ref_turns,
                           std::span<const Turn> hyp_turns, const IouPolicy& iou_policy,
                           EpsPolicy eps = {}, std::vector<std::string>* warnings = nullptr,
                           SegmentErrorCount* counts_out = nullptr);

struct FaSpeakerError {
  double fa_dur = 0.0;  // FA speaker speech duration / global reference duration
  double fa_seg = 0.0;  // FA speaker segments / global reference segments
  double error = 0.0;   // harmonic combination of the two
};

// The false-alarm-speaker term: duration and segment mass of the unmatched
// hypothesis speakers relative to the global reference totals. Both ratios
// may exceed 1; they are deliberately not clamped.
FaSpeakerError fa_speaker_error(const Annotation& hyp,
                                std::span<const std::string> fa_speakers,
                                double global_ref_duration, std::int64_t global_ref_segs,
                                EpsPolicy eps = {},
                                std::vector<std::string>* warnings = nullptr);

struct BerReport {
  std::vector<SpeakerError> per_speaker;  // one entry per reference speaker
  double speaker_ref_error = 0.0;         // mean of per-speaker e_harmonic
  double fa_dur = 0.0;
  double fa_seg = 0.0;
  double speaker_fa_error = 0.0;
  double ber = 0.0;  // speaker_ref_error + speaker_fa_error
  std::int64_t ser_error_segs = 0;
  std::int64_t ser_ref_segs = 0;
  double ser = 0.0;  // ser_error_segs / ser_ref_segs

  // Raw totals carried for corpus aggregation.
  double fa_total_duration = 0.0;
  std::int64_t fa_total_segs = 0;
  double ref_total_duration = 0.0;
};

// Scores one file: optimal mapping, per-speaker duration/segment/harmonic
// errors, speaker-weighted average, false-alarm-speaker term, SER and BER.
BerReport score_file(const Annotation& ref, const Annotation& hyp, const ScoringConfig& config,
                     std::vector<std::string>* warnings = nullptr);

// Same, reusing a mapping already computed for (ref, hyp).
BerReport score_file(const Annotation& ref, const Annotation& hyp,
                     const SpeakerMapping& mapping, const ScoringConfig& config,
                     std::vector<std::string>* warnings = nullptr);

// Corpus roll-up: SER from summed segment counts, speaker-weighted error as
// the mean over all (file, speaker) pairs, and the FA term recomputed from
// summed FA mass over summed reference totals. Throws on empty input.
BerReport aggregate_corpus(std::span<const BerReport> reports, EpsPolicy eps = {},
                           std::vector<std::string>* warnings = nullptr);

}  // namespace diar
