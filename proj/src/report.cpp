#include "diar/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "diar/rttm.hpp"
#include "diar/timeline.hpp"

namespace diar {

using ordered_json = nlohmann::ordered_json;

MetricSet parse_metric_set(const std::string& list) {
  MetricSet set{false, false, false, false, false};
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    if (name == "der") {
      set.der = true;
    } else if (name == "jer") {
      set.jer = true;
    } else if (name == "cder") {
      set.cder = true;
    } else if (name == "ser") {
      set.ser = true;
    } else if (name == "ber") {
      set.ber = true;
    } else if (name == "all") {
      set = MetricSet{};
    } else {
      throw std::invalid_argument("unknown metric '" + name + "'");
    }
  }
  return set;
}

std::string format_percent(double ratio) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.2f", ratio * 100.0);
  return buffer;
}

FileResult score_pair(const Annotation& ref, const Annotation& hyp, const ScoringConfig& config,
                      const ScoringRegion* regions) {
  FileResult result;
  result.file_id = ref.file_id.empty() ? hyp.file_id : ref.file_id;

  const SpeakerMapping mapping = assign(build_overlap_matrix(ref, hyp));
  if (config.metrics.der) {
    result.der = der(ref, hyp, mapping, config.der_collar, regions, &result.warnings);
  }
  if (config.metrics.jer) {
    result.jer = jer(ref, hyp, mapping, &result.warnings);
    result.jer_num_speakers = static_cast<std::int64_t>(result.jer.per_speaker.size());
  }
  if (config.metrics.cder) {
    result.cder = cder_breakdown(ref, hyp, mapping, config.cder_iou, config.cder_max_gap,
                                 &result.warnings);
  }
  if (config.metrics.ser || config.metrics.ber) {
    result.ber = score_file(ref, hyp, mapping, config, &result.warnings);
  }
  return result;
}

CorpusResult score_corpus(const std::map<std::string, Annotation>& ref,
                          const std::map<std::string, Annotation>& hyp,
                          const std::map<std::string, ScoringRegion>& regions,
                          const ScoringConfig& config, int jobs) {
  std::set<std::string> file_ids;
  for (const auto& [id, annotation] : ref) {
    (void)annotation;
    file_ids.insert(id);
  }
  for (const auto& [id, annotation] : hyp) {
    (void)annotation;
    file_ids.insert(id);
  }
  const std::vector<std::string> ids(file_ids.begin(), file_ids.end());

  CorpusResult result;
  result.files.resize(ids.size());

  auto score_one = [&](std::size_t index) {
    const std::string& id = ids[index];
    Annotation empty;
    empty.file_id = id;
    auto ref_it = ref.find(id);
    auto hyp_it = hyp.find(id);
    const Annotation& ref_ann = ref_it != ref.end() ? ref_it->second : empty;
    const Annotation& hyp_ann = hyp_it != hyp.end() ? hyp_it->second : empty;
    auto region_it = regions.find(id);
    const ScoringRegion* region = region_it != regions.end() ? &region_it->second : nullptr;

    FileResult file = score_pair(ref_ann, hyp_ann, config, region);
    file.file_id = id;
    if (ref_it == ref.end()) {
      file.warnings.insert(file.warnings.begin(),
                           id + ": no reference for this file id; all speakers are false alarms");
    } else if (hyp_it == hyp.end()) {
      file.warnings.insert(file.warnings.begin(),
                           id + ": no hypothesis for this file id; scored against empty hypothesis");
    }
    result.files[index] = std::move(file);
  };

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(ids.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      score_one(i);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < ids.size(); i = next.fetch_add(1)) {
          score_one(i);
        }
      });
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }

  result.overall = aggregate_results(result.files, config);
  return result;
}

FileResult aggregate_results(const std::vector<FileResult>& files, const ScoringConfig& config) {
  FileResult total;
  total.file_id = "OVERALL";
  if (files.empty()) {
    return total;
  }

  // Canonical order: by file_id, regardless of how the caller ordered them.
  std::vector<const FileResult*> ordered;
  ordered.reserve(files.size());
  for (const FileResult& file : files) {
    ordered.push_back(&file);
  }
  std::sort(ordered.begin(), ordered.end(), [](const FileResult* a, const FileResult* b) {
    return a->file_id < b->file_id;
  });

  double jer_sum = 0.0;
  std::int64_t jer_count = 0;
  std::vector<BerReport> ber_reports;
  ber_reports.reserve(ordered.size());
  for (const FileResult* file : ordered) {
    total.der.false_alarm += file->der.false_alarm;
    total.der.missed += file->der.missed;
    total.der.confusion += file->der.confusion;
    total.der.ref_total += file->der.ref_total;
    for (const auto& [speaker, value] : file->jer.per_speaker) {
      (void)speaker;
      jer_sum += value;
      ++jer_count;
    }
    total.cder.error_spans += file->cder.error_spans;
    total.cder.ref_spans += file->cder.ref_spans;
    ber_reports.push_back(file->ber);
  }

  const double der_errors = total.der.false_alarm + total.der.missed + total.der.confusion;
  if (total.der.ref_total > 0.0) {
    total.der.der = der_errors / total.der.ref_total;
  } else {
    total.der.der = der_errors > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  total.jer.jer = jer_count > 0 ? jer_sum / static_cast<double>(jer_count) : 0.0;
  total.jer_num_speakers = jer_count;
  total.cder.cder = total.cder.ref_spans > 0
                        ? static_cast<double>(total.cder.error_spans) / total.cder.ref_spans
                        : 0.0;
  if (config.metrics.ser || config.metrics.ber) {
    total.ber = aggregate_corpus(ber_reports, EpsPolicy{config.eps}, &total.warnings);
    total.ber.per_speaker.clear();  // too wide for the aggregate row
  }
  return total;
}

namespace {

ordered_json json_metrics(const FileResult& result, const ScoringConfig& config,
                          bool is_aggregate) {
  ordered_json entry;
  if (!is_aggregate) {
    entry["file_id"] = result.file_id;
  }
  if (config.metrics.der) {
    ordered_json der_json;
    der_json["false_alarm"] = result.der.false_alarm;
    der_json["missed"] = result.der.missed;
    der_json["confusion"] = result.der.confusion;
    der_json["ref_total"] = result.der.ref_total;
    der_json["der"] = result.der.der;
    entry["der"] = std::move(der_json);
  }
  if (config.metrics.jer) {
    ordered_json jer_json;
    jer_json["jer"] = result.jer.jer;
    jer_json["num_speakers"] = result.jer_num_speakers;
    if (!is_aggregate) {
      ordered_json per_speaker = ordered_json::object();
      for (const auto& [speaker, value] : result.jer.per_speaker) {
        per_speaker[speaker] = value;
      }
      jer_json["per_speaker"] = std::move(per_speaker);
    }
    entry["jer"] = std::move(jer_json);
  }
  if (config.metrics.cder) {
    ordered_json cder_json;
    cder_json["error_spans"] = result.cder.error_spans;
    cder_json["ref_spans"] = result.cder.ref_spans;
    cder_json["cder"] = result.cder.cder;
    entry["cder"] = std::move(cder_json);
  }
  if (config.metrics.ser || config.metrics.ber) {
    ordered_json ber_json;
    if (!is_aggregate) {
      ordered_json speakers = ordered_json::array();
      for (const SpeakerError& error : result.ber.per_speaker) {
        ordered_json row;
        row["speaker"] = error.speaker;
        row["e_dur"] = error.e_dur;
        row["e_seg"] = error.e_seg;
        row["e_harmonic"] = error.e_harmonic;
        speakers.push_back(std::move(row));
      }
      ber_json["per_speaker"] = std::move(speakers);
    }
    ber_json["speaker_ref_error"] = result.ber.speaker_ref_error;
    ber_json["fa_dur"] = result.ber.fa_dur;
    ber_json["fa_seg"] = result.ber.fa_seg;
    ber_json["speaker_fa_error"] = result.ber.speaker_fa_error;
    ber_json["ber"] = result.ber.ber;
    ber_json["ser_error_segs"] = result.ber.ser_error_segs;
    ber_json["ser_ref_segs"] = result.ber.ser_ref_segs;
    ber_json["ser"] = result.ber.ser;
    ber_json["fa_total_duration"] = result.ber.fa_total_duration;
    ber_json["fa_total_segs"] = result.ber.fa_total_segs;
    ber_json["ref_total_duration"] = result.ber.ref_total_duration;
    entry["ber"] = std::move(ber_json);
  }
  if (!result.warnings.empty()) {
    entry["warnings"] = result.warnings;
  }
  return entry;
}

ordered_json json_config(const ScoringConfig& config) {
  ordered_json cfg;
  cfg["der_collar"] = config.der_collar;
  cfg["iou_collar"] = config.iou_collar;
  cfg["lb"] = config.lb;
  cfg["eps"] = config.eps;
  cfg["cder_iou"] = config.cder_iou;
  if (std::isfinite(config.cder_max_gap)) {
    cfg["cder_max_gap"] = config.cder_max_gap;
  }
  std::vector<std::string> names;
  if (config.metrics.der) names.push_back("der");
  if (config.metrics.jer) names.push_back("jer");
  if (config.metrics.cder) names.push_back("cder");
  if (config.metrics.ser) names.push_back("ser");
  if (config.metrics.ber) names.push_back("ber");
  cfg["metrics"] = names;
  return cfg;
}

void tsv_header(std::ostringstream& out, const ScoringConfig& config) {
  out << "file";
  if (config.metrics.der) out << "\tder";
  if (config.metrics.jer) out << "\tjer";
  if (config.metrics.cder) out << "\tcder";
  if (config.metrics.ser) out << "\tser";
  if (config.metrics.ber) out << "\tber";
  out << '\n';
}

void tsv_row(std::ostringstream& out, const std::string& label, const FileResult& result,
             const ScoringConfig& config) {
  out << label;
  if (config.metrics.der) out << '\t' << format_percent(result.der.der);
  if (config.metrics.jer) out << '\t' << format_percent(result.jer.jer);
  if (config.metrics.cder) out << '\t' << format_percent(result.cder.cder);
  if (config.metrics.ser) out << '\t' << format_percent(result.ber.ser);
  if (config.metrics.ber) out << '\t' << format_percent(result.ber.ber);
  out << '\n';
}

}  // namespace

std::string render_json(const CorpusResult& result, const ScoringConfig& config) {
  ordered_json root;
  root["config"] = json_config(config);
  ordered_json files = ordered_json::array();
  for (const FileResult& file : result.files) {
    files.push_back(json_metrics(file, config, /*is_aggregate=*/false));
  }
  root["files"] = std::move(files);
  root["corpus"] = json_metrics(result.overall, config, /*is_aggregate=*/true);
  return root.dump(2) + "\n";
}

std::string render_tsv(const CorpusResult& result, const ScoringConfig& config) {
  std::ostringstream out;
  tsv_header(out, config);
  for (const FileResult& file : result.files) {
    tsv_row(out, file.file_id, file, config);
  }
  tsv_row(out, "OVERALL", result.overall, config);
  return out.str();
}

std::string render_table(const CorpusResult& result, const ScoringConfig& config) {
  std::ostringstream out;
  auto metric_line = [&](const FileResult& r) {
    if (config.metrics.der) out << "  der  " << format_percent(r.der.der) << "%\n";
    if (config.metrics.jer) out << "  jer  " << format_percent(r.jer.jer) << "%\n";
    if (config.metrics.cder)
      out << "  cder " << format_percent(r.cder.cder) << "%  (" << r.cder.error_spans << "/"
          << r.cder.ref_spans << " spans)\n";
    if (config.metrics.ser)
      out << "  ser  " << format_percent(r.ber.ser) << "%  (" << r.ber.ser_error_segs << "/"
          << r.ber.ser_ref_segs << " segments)\n";
    if (config.metrics.ber)
      out << "  ber  " << format_percent(r.ber.ber) << "%  (speaker_ref "
          << format_percent(r.ber.speaker_ref_error) << "% + speaker_fa "
          << format_percent(r.ber.speaker_fa_error) << "%)\n";
  };

  for (const FileResult& file : result.files) {
    out << "=== " << file.file_id << " ===\n";
    metric_line(file);
    if (config.metrics.ber && !file.ber.per_speaker.empty()) {
      out << "  speakers (e_dur / e_seg / e_harmonic):\n";
      for (const SpeakerError& error : file.ber.per_speaker) {
        out << "    " << error.speaker << "  " << format_percent(error.e_dur) << "%  "
            << format_percent(error.e_seg) << "%  " << format_percent(error.e_harmonic)
            << "%\n";
      }
    } else if (config.metrics.jer && !file.jer.per_speaker.empty()) {
      out << "  speakers (jer):\n";
      for (const auto& [speaker, value] : file.jer.per_speaker) {
        out << "    " << speaker << "  " << format_percent(value) << "%\n";
      }
    }
    for (const std::string& warning : file.warnings) {
      out << "  warning: " << warning << '\n';
    }
  }
  out << "=== OVERALL (" << result.files.size() << " files) ===\n";
  metric_line(result.overall);
  return out.str();
}

std::vector<FileResult> parse_json_report(const std::string& json_text) {
  const ordered_json root = ordered_json::parse(json_text);
  std::vector<FileResult> files;
  for (const auto& entry : root.at("files")) {
    FileResult file;
    file.file_id = entry.at("file_id").get<std::string>();
    if (entry.contains("der")) {
      const auto& der_json = entry["der"];
      file.der.false_alarm = der_json.at("false_alarm").get<double>();
      file.der.missed = der_json.at("missed").get<double>();
      file.der.confusion = der_json.at("confusion").get<double>();
      file.der.ref_total = der_json.at("ref_total").get<double>();
      file.der.der = der_json.at("der").is_null()
                         ? std::numeric_limits<double>::infinity()
                         : der_json.at("der").get<double>();
    }
    if (entry.contains("jer")) {
      file.jer.jer = entry["jer"].at("jer").get<double>();
      file.jer_num_speakers = entry["jer"].at("num_speakers").get<std::int64_t>();
      if (entry["jer"].contains("per_speaker")) {
        for (const auto& [speaker, value] : entry["jer"]["per_speaker"].items()) {
          file.jer.per_speaker.emplace(speaker, value.get<double>());
        }
      }
    }
    if (entry.contains("cder")) {
      file.cder.error_spans = entry["cder"].at("error_spans").get<int>();
      file.cder.ref_spans = entry["cder"].at("ref_spans").get<int>();
      file.cder.cder = entry["cder"].at("cder").get<double>();
    }
    if (entry.contains("ber")) {
      const auto& ber_json = entry["ber"];
      if (ber_json.contains("per_speaker")) {
        for (const auto& row : ber_json["per_speaker"]) {
          SpeakerError error;
          error.speaker = row.at("speaker").get<std::string>();
          error.e_dur = row.at("e_dur").get<double>();
          error.e_seg = row.at("e_seg").get<double>();
          error.e_harmonic = row.at("e_harmonic").get<double>();
          file.ber.per_speaker.push_back(std::move(error));
        }
      }
      file.ber.speaker_ref_error = ber_json.at("speaker_ref_error").get<double>();
      file.ber.fa_dur = ber_json.at("fa_dur").get<double>();
      file.ber.fa_seg = ber_json.at("fa_seg").get<double>();
      file.ber.speaker_fa_error = ber_json.at("speaker_fa_error").get<double>();
      file.ber.ber = ber_json.at("ber").get<double>();
      file.ber.ser_error_segs = ber_json.at("ser_error_segs").get<std::int64_t>();
      file.ber.ser_ref_segs = ber_json.at("ser_ref_segs").get<std::int64_t>();
      file.ber.ser = ber_json.at("ser").get<double>();
      file.ber.fa_total_duration = ber_json.at("fa_total_duration").get<double>();
      file.ber.fa_total_segs = ber_json.at("fa_total_segs").get<std::int64_t>();
      file.ber.ref_total_duration = ber_json.at("ref_total_duration").get<double>();
    }
    files.push_back(std::move(file));
  }
  return files;
}

// --- sensitivity sweeps -----------------------------------------------------

SweepSpec parse_sweep_spec(const std::string& json_text) {
  ordered_json root;
  try {
    root = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("sweep spec is not valid JSON: ") + e.what());
  }

  SweepSpec spec;
  try {
    spec.kind = parse_perturb_kind(root.at("perturb").get<std::string>());
    for (const auto& m : root.at("magnitudes")) {
      spec.magnitudes.push_back(m.get<double>());
    }
    if (root.contains("seed")) {
      spec.seed = root["seed"].get<std::uint64_t>();
    }
    const auto& corpus = root.at("corpus");
    const std::string kind = corpus.value("kind", std::string("lognormal"));
    if (kind == "lognormal") {
      spec.corpus_kind = SyntheticCorpusKind::kLognormal;
    } else if (kind == "long_short") {
      spec.corpus_kind = SyntheticCorpusKind::kLongShort;
    } else {
      throw std::invalid_argument("unknown corpus kind '" + kind + "'");
    }
    spec.num_files = corpus.value("num_files", spec.num_files);
    spec.speakers_per_file = corpus.value("speakers_per_file", spec.speakers_per_file);
    spec.segments_per_speaker = corpus.value("segments_per_speaker", spec.segments_per_speaker);
    if (corpus.contains("quantiles")) {
      const auto& q = corpus["quantiles"];
      if (!q.is_array() || q.size() != 3) {
        throw std::invalid_argument("corpus.quantiles must be [q25, q50, q75]");
      }
      spec.quantiles = LengthQuantiles{q[0].get<double>(), q[1].get<double>(),
                                       q[2].get<double>()};
    }
    spec.long_duration = corpus.value("long_duration", spec.long_duration);
    spec.short_duration = corpus.value("short_duration", spec.short_duration);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad sweep spec: ") + e.what());
  }
  if (spec.magnitudes.empty()) {
    throw std::invalid_argument("sweep spec needs at least one magnitude");
  }
  if (spec.num_files < 1) {
    throw std::invalid_argument("sweep spec needs at least one file");
  }
  return spec;
}

namespace {

std::vector<Annotation> build_sweep_corpus(const SweepSpec& spec) {
  if (spec.corpus_kind == SyntheticCorpusKind::kLognormal) {
    return generate_reference(spec.num_files, spec.speakers_per_file, spec.quantiles,
                              spec.seed, spec.segments_per_speaker);
  }
  // long_short: per file a single speaker with one long and one short segment,
  // the shape behind the short-segment sensitivity argument.
  std::vector<Annotation> corpus;
  corpus.reserve(static_cast<std::size_t>(spec.num_files));
  char name[32];
  for (int f = 0; f < spec.num_files; ++f) {
    Annotation annotation;
    std::snprintf(name, sizeof(name), "synth_%04d", f);
    annotation.file_id = name;
    Turn long_turn;
    long_turn.file_id = annotation.file_id;
    long_turn.onset = 0.0;
    long_turn.duration = spec.long_duration;
    long_turn.speaker = "spk00";
    annotation.add_turn(long_turn);
    Turn short_turn = long_turn;
    short_turn.onset = spec.long_duration + 10.0;
    short_turn.duration = spec.short_duration;
    annotation.add_turn(short_turn);
    corpus.push_back(std::move(annotation));
  }
  return corpus;
}

}  // namespace

std::vector<SweepRow> run_sensitivity(const SweepSpec& spec, const ScoringConfig& config,
                                      int jobs) {
  const std::vector<Annotation> reference = build_sweep_corpus(spec);
  std::map<std::string, Annotation> ref_map;
  for (const Annotation& annotation : reference) {
    ref_map.emplace(annotation.file_id, annotation);
  }
  const std::map<std::string, ScoringRegion> no_regions;

  std::vector<SweepRow> rows;
  rows.reserve(spec.magnitudes.size());
  for (const double magnitude : spec.magnitudes) {
    std::map<std::string, Annotation> hyp_map;
    std::uint64_t file_index = 0;
    for (const Annotation& annotation : reference) {
      PerturbSpec perturb{spec.kind, magnitude, spec.seed + 0x517CC1B727220A95ull * ++file_index};
      hyp_map.emplace(annotation.file_id, apply_perturbation(annotation, perturb));
    }
    const CorpusResult scored = score_corpus(ref_map, hyp_map, no_regions, config, jobs);
    SweepRow row;
    row.magnitude = magnitude;
    row.corpus = scored.overall;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_sweep_json(const SweepSpec& spec, const std::vector<SweepRow>& rows,
                              const ScoringConfig& config) {
  ordered_json root;
  root["perturb"] = to_string(spec.kind);
  root["seed"] = spec.seed;
  root["config"] = json_config(config);
  ordered_json rows_json = ordered_json::array();
  for (const SweepRow& row : rows) {
    ordered_json entry = json_metrics(row.corpus, config, /*is_aggregate=*/true);
    entry["magnitude"] = row.magnitude;
    rows_json.push_back(std::move(entry));
  }
  root["rows"] = std::move(rows_json);
  return root.dump(2) + "\n";
}

std::string render_sweep_tsv(const std::vector<SweepRow>& rows, const ScoringConfig& config) {
  std::ostringstream out;
  out << "magnitude";
  if (config.metrics.der) out << "\tder";
  if (config.metrics.jer) out << "\tjer";
  if (config.metrics.cder) out << "\tcder";
  if (config.metrics.ser) out << "\tser";
  if (config.metrics.ber) out << "\tber";
  out << '\n';
  char magnitude[48];
  for (const SweepRow& row : rows) {
    std::snprintf(magnitude, sizeof(magnitude), "%g", row.magnitude);
    out << magnitude;
    if (config.metrics.der) out << '\t' << format_percent(row.corpus.der.der);
    if (config.metrics.jer) out << '\t' << format_percent(row.corpus.jer.jer);
    if (config.metrics.cder) out << '\t' << format_percent(row.corpus.cder.cder);
    if (config.metrics.ser) out << '\t' << format_percent(row.corpus.ber.ser);
    if (config.metrics.ber) out << '\t' << format_percent(row.corpus.ber.ber);
    out << '\n';
  }
  return out.str();
}

std::string render_sweep_table(const std::vector<SweepRow>& rows, const ScoringConfig& config) {
  std::ostringstream out;
  out << "magnitude";
  if (config.metrics.der) out << "      der";
  if (config.metrics.jer) out << "      jer";
  if (config.metrics.cder) out << "     cder";
  if (config.metrics.ser) out << "      ser";
  if (config.metrics.ber) out << "      ber";
  out << '\n';
  char buffer[64];
  for (const SweepRow& row : rows) {
    std::snprintf(buffer, sizeof(buffer), "%9g", row.magnitude);
    out << buffer;
    auto cell = [&](double ratio) {
      std::snprintf(buffer, sizeof(buffer), " %8s", format_percent(ratio).c_str());
      out << buffer;
    };
    if (config.metrics.der) cell(row.corpus.der.der);
    if (config.metrics.jer) cell(row.corpus.jer.jer);
    if (config.metrics.cder) cell(row.corpus.cder.cder);
    if (config.metrics.ser) cell(row.corpus.ber.ser);
    if (config.metrics.ber) cell(row.corpus.ber.ber);
    out << '\n';
  }
  return out.str();
}

}  // namespace diar
