#include "diar/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace diar {

namespace {

// All synthetic times live on a binary grid so that sums and differences of
// generated values are exact in double precision.
constexpr double kGrid = 1.0 / 1024.0;

double snap(double seconds) { return std::round(seconds * 1024.0) * kGrid; }

std::uint64_t file_seed(std::uint64_t seed, std::uint64_t index) {
  return seed + index * 0x9E3779B97F4A7C15ull;
}

// 75% quantile of the standard normal distribution.
constexpr double kZ75 = 0.6744897501960817;

std::string pick_other_speaker(const std::vector<std::string>& speakers,
                               const std::string& current, std::mt19937_64& rng) {
  if (speakers.size() < 2) {
    return current;
  }
  std::uniform_int_distribution<std::size_t> dist(0, speakers.size() - 2);
  std::size_t pick = dist(rng);
  // Skip over `current` in the sorted list.
  for (std::size_t i = 0, seen = 0; i < speakers.size(); ++i) {
    if (speakers[i] == current) continue;
    if (seen++ == pick) return speakers[i];
  }
  return current;
}

std::string unused_speaker_name(const Annotation& annotation) {
  for (int i = 0;; ++i) {
    std::string name = "FA" + std::to_string(i);
    if (annotation.turns_by_speaker.find(name) == annotation.turns_by_speaker.end()) {
      return name;
    }
  }
}

}  // namespace

PerturbKind parse_perturb_kind(const std::string& name) {
  if (name == "drop_short") return PerturbKind::kDropShort;
  if (name == "boundary_jitter") return PerturbKind::kBoundaryJitter;
  if (name == "split") return PerturbKind::kSplit;
  if (name == "merge_adjacent") return PerturbKind::kMergeAdjacent;
  if (name == "confuse_speaker") return PerturbKind::kConfuseSpeaker;
  if (name == "add_fa_speaker") return PerturbKind::kAddFaSpeaker;
  throw std::invalid_argument("unknown perturbation kind '" + name + "'");
}

std::string to_string(PerturbKind kind) {
  switch (kind) {
    case PerturbKind::kDropShort: return "drop_short";
    case PerturbKind::kBoundaryJitter: return "boundary_jitter";
    case PerturbKind::kSplit: return "split";
    case PerturbKind::kMergeAdjacent: return "merge_adjacent";
    case PerturbKind::kConfuseSpeaker: return "confuse_speaker";
    case PerturbKind::kAddFaSpeaker: return "add_fa_speaker";
  }
  return "?";
}

Annotation apply_perturbation(const Annotation& annotation, const PerturbSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  Annotation result;
  result.file_id = annotation.file_id;

  switch (spec.kind) {
    case PerturbKind::kDropShort: {
      for (const auto& [speaker, turns] : annotation.turns_by_speaker) {
        (void)speaker;
        for (const Turn& turn : turns) {
          if (turn.duration >= spec.magnitude) {
            result.add_turn(turn);
          }
        }
      }
      break;
    }

    case PerturbKind::kBoundaryJitter: {
      // Jitter offsets are drawn in grid steps; a jittered grid corpus stays
      // on the grid. Degenerate segments are clamped, not deleted, so the
      // segment count is preserved.
      const long steps = std::lround(spec.magnitude * 1024.0);
      std::uniform_int_distribution<long> dist(-steps, steps);
      for (const auto& [speaker, turns] : annotation.turns_by_speaker) {
        (void)speaker;
        for (const Turn& turn : turns) {
          if (steps == 0) {
            result.add_turn(turn);
            continue;
          }
          Turn jittered = turn;
          double onset = std::max(0.0, turn.onset + dist(rng) * kGrid);
          double offset = turn.offset() + dist(rng) * kGrid;
          if (offset - onset < 0.01) {
            offset = onset + 0.01;
          }
          jittered.onset = onset;
          jittered.duration = offset - onset;
          result.add_turn(jittered);
        }
      }
      break;
    }

    case PerturbKind::kSplit: {
      std::bernoulli_distribution flip(std::clamp(spec.magnitude, 0.0, 1.0));
      std::uniform_real_distribution<double> where(0.2, 0.8);
      for (const auto& [speaker, turns] : annotation.turns_by_speaker) {
        (void)speaker;
        for (const Turn& turn : turns) {
          if (spec.magnitude > 0.0 && turn.duration > 2.0 * kGrid && flip(rng)) {
            const double cut = snap(turn.onset + where(rng) * turn.duration);
            if (cut > turn.onset && cut < turn.offset()) {
              Turn left = turn;
              left.duration = cut - turn.onset;
              Turn right = turn;
              right.onset = cut;
              right.duration = turn.offset() - cut;
              result.add_turn(left);
              result.add_turn(right);
              continue;
            }
          }
          result.add_turn(turn);
        }
      }
      break;
    }

    case PerturbKind::kMergeAdjacent: {
      for (const auto& [speaker, turns] : annotation.turns_by_speaker) {
        (void)speaker;
        std::size_t i = 0;
        while (i < turns.size()) {
          Turn merged = turns[i];
          double end = merged.offset();
          std::size_t j = i + 1;
          while (j < turns.size() && turns[j].onset - end < spec.magnitude) {
            end = std::max(end, turns[j].offset());
            ++j;
          }
          merged.duration = end - merged.onset;
          result.add_turn(merged);
          i = j;
        }
      }
      break;
    }

    case PerturbKind::kConfuseSpeaker: {
      const std::vector<std::string> speakers = annotation.speakers();
      std::bernoulli_distribution flip(std::clamp(spec.magnitude, 0.0, 1.0));
      for (const auto& [speaker, turns] : annotation.turns_by_speaker) {
        for (const Turn& turn : turns) {
          Turn relabeled = turn;
          if (spec.magnitude > 0.0 && flip(rng)) {
            relabeled.speaker = pick_other_speaker(speakers, speaker, rng);
          }
          result.add_turn(relabeled);
        }
      }
      break;
    }

    case PerturbKind::kAddFaSpeaker: {
      for (const auto& [speaker, turns] : annotation.turns_by_speaker) {
        (void)speaker;
        for (const Turn& turn : turns) {
          result.add_turn(turn);
        }
      }
      long remaining = std::lround(spec.magnitude * 1024.0);
      if (remaining <= 0) {
        break;
      }
      const std::string fa_name = unused_speaker_name(annotation);
      double extent = 100.0;
      for (const auto& [speaker, turns] : annotation.turns_by_speaker) {
        (void)speaker;
        for (const Turn& turn : turns) {
          extent = std::max(extent, turn.offset());
        }
      }
      std::uniform_real_distribution<double> place(0.0, extent);
      while (remaining > 0) {
        const long chunk = std::min(remaining, 1536L);  // at most 1.5 s per segment
        Turn fa;
        fa.file_id = annotation.file_id;
        fa.onset = snap(place(rng));
        fa.duration = chunk * kGrid;
        fa.speaker = fa_name;
        result.add_turn(fa);
        remaining -= chunk;
      }
      break;
    }
  }
  return result;
}

std::vector<Annotation> generate_reference(int num_files, int speakers_per_file,
                                           const LengthQuantiles& quantiles,
                                           std::uint64_t seed, int segments_per_speaker) {
  if (num_files < 0 || speakers_per_file < 1 || segments_per_speaker < 1) {
    throw std::invalid_argument("generate_reference: invalid corpus shape");
  }
  if (!(quantiles.q25 > 0.0) || !(quantiles.q50 > quantiles.q25) ||
      !(quantiles.q75 > quantiles.q50)) {
    throw std::invalid_argument("generate_reference: quantiles must be increasing and > 0");
  }

  // Lognormal fit: the median pins mu, the quartile spread pins sigma.
  const double mu = std::log(quantiles.q50);
  const double sigma = std::log(quantiles.q75 / quantiles.q25) / (2.0 * kZ75);

  std::vector<Annotation> corpus;
  corpus.reserve(static_cast<std::size_t>(num_files));
  char name[32];
  for (int f = 0; f < num_files; ++f) {
    std::mt19937_64 rng(file_seed(seed, static_cast<std::uint64_t>(f)));
    std::lognormal_distribution<double> length(mu, sigma);
    std::lognormal_distribution<double> gap(0.0, 0.6);
    std::uniform_real_distribution<double> head(0.0, 2.0);

    Annotation annotation;
    std::snprintf(name, sizeof(name), "synth_%04d", f);
    annotation.file_id = name;
    for (int s = 0; s < speakers_per_file; ++s) {
      std::snprintf(name, sizeof(name), "spk%02d", s);
      const std::string speaker = name;
      double cursor = snap(head(rng));
      for (int k = 0; k < segments_per_speaker; ++k) {
        const double len = snap(std::clamp(length(rng), 0.05, 60.0));
        Turn turn;
        turn.file_id = annotation.file_id;
        turn.onset = cursor;
        turn.duration = std::max(len, kGrid);
        turn.speaker = speaker;
        annotation.add_turn(turn);
        cursor = snap(cursor + turn.duration + std::clamp(gap(rng), 0.05, 30.0));
      }
    }
    corpus.push_back(std::move(annotation));
  }
  return corpus;
}

}  // namespace diar
