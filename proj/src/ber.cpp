#include "diar/ber.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "diar/timeline.hpp"

namespace diar {

double harmonic_mean_eps(double a, double b, EpsPolicy eps) {
  if (a == 0.0 && b == 0.0) {
    return 0.0;  // the formula collapses to eps - eps
  }
  return 2.0 / (1.0 / (a + eps.eps) + 1.0 / (b + eps.eps)) - eps.eps;
}

SpeakerError speaker_error(const std::string& ref_speaker, std::span<const Turn> ref_turns,
                           std::span<const Turn> hyp_turns, const IouPolicy& iou_policy,
                           EpsPolicy eps, std::vector<std::string>* warnings,
                           SegmentErrorCount* counts_out) {
  SpeakerError error;
  error.speaker = ref_speaker;

  const Timeline ref_tl = Timeline::from_turns(ref_turns);
  const Timeline hyp_tl = Timeline::from_turns(hyp_turns);
  const double ref_duration = ref_tl.total_duration();
  const double fa = subtract(hyp_tl, ref_tl).total_duration();
  const double ms = subtract(ref_tl, hyp_tl).total_duration();
  if (ref_duration > 0.0) {
    error.e_dur = (fa + ms) / ref_duration;
  } else if (hyp_tl.empty()) {
    error.e_dur = 0.0;
  } else {
    error.e_dur = std::numeric_limits<double>::infinity();
  }
  if (!(ref_duration > 0.0) && warnings != nullptr) {
    warnings->push_back("reference speaker " + ref_speaker + " has zero duration");
  }

  const SegmentErrorCount segs = speaker_segment_error(ref_turns, hyp_turns, iou_policy,
                                                       warnings);
  error.e_seg = segs.ref_segs > 0
                    ? static_cast<double>(segs.error_segs) / segs.ref_segs
                    : 0.0;
  error.e_harmonic = harmonic_mean_eps(error.e_dur, error.e_seg, eps);
  if (counts_out != nullptr) {
    *counts_out = segs;
  }
  return error;
}

namespace {

// Speech duration and segment count of the false-alarm speakers, summed in
// value order so relabeling the hypothesis cannot change the total in the
// last bit.
std::pair<double, std::int64_t> fa_mass(const Annotation& hyp,
                                        std::span<const std::string> fa_speakers) {
  std::vector<std::pair<double, std::int64_t>> mass;
  mass.reserve(fa_speakers.size());
  for (const std::string& speaker : fa_speakers) {
    const Timeline tl = speaker_timeline(hyp, speaker);
    auto it = hyp.turns_by_speaker.find(speaker);
    const std::int64_t segs =
        it != hyp.turns_by_speaker.end() ? static_cast<std::int64_t>(it->second.size()) : 0;
    mass.emplace_back(tl.total_duration(), segs);
  }
  std::sort(mass.begin(), mass.end());
  double fa_duration = 0.0;
  std::int64_t fa_segs = 0;
  for (const auto& [duration, segs] : mass) {
    fa_duration += duration;
    fa_segs += segs;
  }
  return {fa_duration, fa_segs};
}

}  // namespace

FaSpeakerError fa_speaker_error(const Annotation& hyp,
                                std::span<const std::string> fa_speakers,
                                double global_ref_duration, std::int64_t global_ref_segs,
                                EpsPolicy eps, std::vector<std::string>* warnings) {
  FaSpeakerError result;
  if (fa_speakers.empty()) {
    return result;
  }
  const auto [fa_duration, fa_segs] = fa_mass(hyp, fa_speakers);

  if (global_ref_duration > 0.0 && global_ref_segs > 0) {
    result.fa_dur = fa_duration / global_ref_duration;
    result.fa_seg = static_cast<double>(fa_segs) / static_cast<double>(global_ref_segs);
    result.error = harmonic_mean_eps(result.fa_dur, result.fa_seg, eps);
  } else if (warnings != nullptr) {
    warnings->push_back("false-alarm speakers present but reference is empty; FA term is 0");
  }
  return result;
}

BerReport score_file(const Annotation& ref, const Annotation& hyp, const ScoringConfig& config,
                     std::vector<std::string>* warnings) {
  const SpeakerMapping mapping = assign(build_overlap_matrix(ref, hyp));
  return score_file(ref, hyp, mapping, config, warnings);
}

BerReport score_file(const Annotation& ref, const Annotation& hyp,
                     const SpeakerMapping& mapping, const ScoringConfig& config,
                     std::vector<std::string>* warnings) {
  const IouPolicy iou_policy{config.iou_collar, config.lb};
  const EpsPolicy eps{config.eps};
  static const std::vector<Turn> kNoTurns;

  BerReport report;
  for (const auto& [speaker, ref_turns] : ref.turns_by_speaker) {
    const std::string* hyp_speaker = mapping.hyp_for(speaker);
    const std::vector<Turn>* hyp_turns = &kNoTurns;
    if (hyp_speaker != nullptr) {
      auto it = hyp.turns_by_speaker.find(*hyp_speaker);
      if (it != hyp.turns_by_speaker.end()) {
        hyp_turns = &it->second;
      }
    }
    SegmentErrorCount segs;
    SpeakerError error = speaker_error(speaker, ref_turns, *hyp_turns, iou_policy, eps,
                                       warnings, &segs);
    report.ser_error_segs += segs.error_segs;
    report.ser_ref_segs += segs.ref_segs;
    report.ref_total_duration += Timeline::from_turns(ref_turns).total_duration();
    report.per_speaker.push_back(std::move(error));
  }

  double harmonic_sum = 0.0;
  for (const SpeakerError& error : report.per_speaker) {
    harmonic_sum += error.e_harmonic;
  }
  if (!report.per_speaker.empty()) {
    report.speaker_ref_error = harmonic_sum / static_cast<double>(report.per_speaker.size());
  } else if (warnings != nullptr && !hyp.empty()) {
    warnings->push_back(ref.file_id + ": no reference speakers; speaker errors are 0");
  }

  std::tie(report.fa_total_duration, report.fa_total_segs) =
      fa_mass(hyp, mapping.hyp_false_alarm);
  const FaSpeakerError fa = fa_speaker_error(hyp, mapping.hyp_false_alarm,
                                             report.ref_total_duration, report.ser_ref_segs,
                                             eps, warnings);
  report.fa_dur = fa.fa_dur;
  report.fa_seg = fa.fa_seg;
  report.speaker_fa_error = fa.error;
  report.ber = report.speaker_ref_error + report.speaker_fa_error;

  if (report.ser_ref_segs > 0) {
    report.ser = static_cast<double>(report.ser_error_segs) /
                 static_cast<double>(report.ser_ref_segs);
  } else {
    report.ser = 0.0;
    if (warnings != nullptr && !hyp.empty()) {
      warnings->push_back(ref.file_id + ": SER over zero reference segments, using 0");
    }
  }
  return report;
}

BerReport aggregate_corpus(std::span<const BerReport> reports, EpsPolicy eps,
                           std::vector<std::string>* warnings) {
  if (reports.empty()) {
    throw std::invalid_argument("aggregate_corpus: no reports");
  }

  BerReport total;
  double harmonic_sum = 0.0;
  std::int64_t num_speakers = 0;
  for (const BerReport& report : reports) {
    for (const SpeakerError& error : report.per_speaker) {
      total.per_speaker.push_back(error);
      harmonic_sum += error.e_harmonic;
      ++num_speakers;
    }
    total.ser_error_segs += report.ser_error_segs;
    total.ser_ref_segs += report.ser_ref_segs;
    total.ref_total_duration += report.ref_total_duration;
    total.fa_total_duration += report.fa_total_duration;
    total.fa_total_segs += report.fa_total_segs;
  }

  if (num_speakers > 0) {
    total.speaker_ref_error = harmonic_sum / static_cast<double>(num_speakers);
  }
  if (total.ref_total_duration > 0.0 && total.ser_ref_segs > 0) {
    total.fa_dur = total.fa_total_duration / total.ref_total_duration;
    total.fa_seg = static_cast<double>(total.fa_total_segs) /
                   static_cast<double>(total.ser_ref_segs);
    total.speaker_fa_error = harmonic_mean_eps(total.fa_dur, total.fa_seg, eps);
  } else if (total.fa_total_segs > 0 && warnings != nullptr) {
    warnings->push_back("corpus: false-alarm speakers present but reference is empty");
  }
  total.ber = total.speaker_ref_error + total.speaker_fa_error;
  if (total.ser_ref_segs > 0) {
    total.ser = static_cast<double>(total.ser_error_segs) /
                static_cast<double>(total.ser_ref_segs);
  } else if (warnings != nullptr) {
    warnings->push_back("corpus: SER over zero reference segments, using 0");
  }
  return total;
}

}  // namespace diar
