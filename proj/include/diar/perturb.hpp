#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diar/types.hpp"

namespace diar {

enum class PerturbKind {
  kDropShort,       // remove segments shorter than `magnitude` seconds
  kBoundaryJitter,  // shift each boundary by uniform +-magnitude seconds
  kSplit,           // split segments at a random interior point with prob. magnitude
  kMergeAdjacent,   // fuse same-speaker neighbors with gap < magnitude seconds
  kConfuseSpeaker,  // relabel segments to another speaker with prob. magnitude
  kAddFaSpeaker,    // append a new speaker totaling `magnitude` seconds
};

PerturbKind parse_perturb_kind(const std::string& name);
std::string to_string(PerturbKind kind);

struct PerturbSpec {
  PerturbKind kind = PerturbKind::kDropShort;
  double magnitude = 0.0;
  std::uint64_t seed = 0;
};

// Deterministic: identical (annotation, spec) yields an identical result.
Annotation apply_perturbation(const Annotation& annotation, const PerturbSpec& spec);

// Segment-length quantile targets in seconds (25%, 50%, 75%).
struct LengthQuantiles {
  double q25 = 0.75;
  double q50 = 1.47;
  double q75 = 3.13;
};

// Synthetic reference corpus with lognormal segment lengths fit to the
// quantile targets. Deterministic for a fixed seed. All times are snapped to
// a 2^-10 s grid, which keeps interval arithmetic on the corpus exact.
std::vector<Annotation> generate_reference(int num_files, int speakers_per_file,
                                           const LengthQuantiles& quantiles,
                                           std::uint64_t seed,
                                           int segments_per_speaker = 20);

}  // namespace diar
