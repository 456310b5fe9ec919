#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "diar/ber.hpp"
#include "diar/config.hpp"
#include "diar/duration_metrics.hpp"
#include "diar/perturb.hpp"
#include "diar/segment_metrics.hpp"
#include "diar/types.hpp"

namespace diar {

// Full metric decomposition for one file (or a corpus aggregate).
struct FileResult {
  std::string file_id;
  DerBreakdown der;
  JerBreakdown jer;
  std::int64_t jer_num_speakers = 0;  // speakers pooled into the jer mean
  CderBreakdown cder;
  BerReport ber;
  std::vector<std::string> warnings;
};

struct CorpusResult {
  std::vector<FileResult> files;  // sorted by file_id
  FileResult overall;             // file_id = "OVERALL"
};

FileResult score_pair(const Annotation& ref, const Annotation& hyp, const ScoringConfig& config,
                      const ScoringRegion* regions = nullptr);

// Scores the union of reference and hypothesis file ids. A hypothesis file
// without a reference is scored against an empty reference (all speakers
// false alarms, with a warning); a reference file without a hypothesis is
// scored against an empty hypothesis. Files may be scored on `jobs` threads;
// the result is identical regardless of the thread count.
CorpusResult score_corpus(const std::map<std::string, Annotation>& ref,
                          const std::map<std::string, Annotation>& hyp,
                          const std::map<std::string, ScoringRegion>& regions,
                          const ScoringConfig& config, int jobs = 1);

// Aggregation used for the OVERALL row: DER and CDER sum numerators and
// denominators, JER pools (file, speaker) values, BER/SER via
// aggregate_corpus. Input order does not matter; files are summed in
// file_id order.
FileResult aggregate_results(const std::vector<FileResult>& files, const ScoringConfig& config);

// "12.34" for ratio 0.1234; two decimals, matching the reporting convention.
std::string format_percent(double ratio);

// Deterministic emitters: fixed key order, fixed float formatting. JSON
// carries full-precision ratios plus the raw totals needed to re-aggregate;
// TSV and the human table report percentages with two decimals.
std::string render_json(const CorpusResult& result, const ScoringConfig& config);
std::string render_tsv(const CorpusResult& result, const ScoringConfig& config);
std::string render_table(const CorpusResult& result, const ScoringConfig& config);

// Re-reads a JSON report (as produced by render_json) into per-file results,
// e.g. to re-aggregate them.
std::vector<FileResult> parse_json_report(const std::string& json_text);

// --- sensitivity sweeps -----------------------------------------------------

enum class SyntheticCorpusKind {
  kLognormal,  // generate_reference()
  kLongShort,  // per file one long and one short segment, single speaker
};

struct SweepSpec {
  PerturbKind kind = PerturbKind::kDropShort;
  std::vector<double> magnitudes;
  std::uint64_t seed = 0;
  SyntheticCorpusKind corpus_kind = SyntheticCorpusKind::kLognormal;
  int num_files = 10;
  int speakers_per_file = 3;
  int segments_per_speaker = 20;
  LengthQuantiles quantiles;
  double long_duration = 10.0;
  double short_duration = 0.5;
};

// Parses the sweep description JSON; see README for the schema. Throws
// std::invalid_argument on malformed input.
SweepSpec parse_sweep_spec(const std::string& json_text);

struct SweepRow {
  double magnitude = 0.0;
  FileResult corpus;  // aggregate over all files at this magnitude
};

// Builds the synthetic corpus, perturbs it at each magnitude, and scores
// reference vs. perturbed hypothesis. Deterministic for a fixed seed.
std::vector<SweepRow> run_sensitivity(const SweepSpec& spec, const ScoringConfig& config,
                                      int jobs = 1);

std::string render_sweep_json(const SweepSpec& spec, const std::vector<SweepRow>& rows,
                              const ScoringConfig& config);
std::string render_sweep_tsv(const std::vector<SweepRow>& rows, const ScoringConfig& config);
std::string render_sweep_table(const std::vector<SweepRow>& rows, const ScoringConfig& config);

}  // namespace diar
