// Batch scoring front end: score RTTM file pairs or directory corpora, and
// run perturbation sensitivity sweeps on synthetic references.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "diar/report.hpp"
#include "diar/rttm.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<diar::Turn> load_rttm_path(const std::string& path) {
  std::vector<std::string> sources;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".rttm") {
        sources.push_back(entry.path().string());
      }
    }
    std::sort(sources.begin(), sources.end());
    if (sources.empty()) {
      throw std::runtime_error("no .rttm files under " + path);
    }
  } else {
    sources.push_back(path);
  }

  std::vector<diar::Turn> turns;
  for (const std::string& source : sources) {
    std::ifstream in(source);
    if (!in) {
      throw std::runtime_error("cannot open " + source);
    }
    auto batch = diar::parse_rttm(in, source);
    turns.insert(turns.end(), batch.begin(), batch.end());
  }
  return turns;
}

int emit(const std::string& format, const diar::CorpusResult& result,
         const diar::ScoringConfig& config) {
  if (format == "json") {
    std::cout << diar::render_json(result, config);
  } else if (format == "tsv") {
    std::cout << diar::render_tsv(result, config);
  } else {
    std::cout << diar::render_table(result, config);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diarization scoring toolkit (DER / JER / CDER / SER / BER)"};
  app.require_subcommand(1);

  diar::ScoringConfig config;
  std::string metric_list = "all";
  std::string format = "table";
  int jobs = 1;
  bool strict = false;

  auto add_scoring_flags = [&](CLI::App* cmd) {
    cmd->add_option("--der-collar", config.der_collar,
                    "DER boundary collar in seconds (default 0)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--iou-collar", config.iou_collar,
                    "collar feeding the adaptive IoU threshold (default 0.25)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--lb", config.lb, "adaptive IoU lower bound (default 0.5)")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--eps", config.eps, "harmonic mean regularizer (default 1e-6)")
        ->check(CLI::Range(1e-12, 1e-3));
    cmd->add_option("--cder-iou", config.cder_iou, "fixed IoU for CDER (default 0.5)")
        ->check(CLI::Range(1e-9, 1.0));
    cmd->add_option("--cder-max-gap", config.cder_max_gap,
                    "bound the gap CDER merges across (default: unbounded)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--metrics", metric_list, "comma list from der,jer,cder,ser,ber");
    cmd->add_option("--format", format, "json | tsv | table")
        ->check(CLI::IsMember({"json", "tsv", "table"}));
    cmd->add_option("--jobs", jobs, "files scored in parallel (default 1)")
        ->check(CLI::PositiveNumber);
  };

  std::string ref_path;
  std::string hyp_path;
  std::string uem_path;
  CLI::App* score = app.add_subcommand("score", "score hypothesis RTTM against reference");
  score->add_option("--ref", ref_path, "reference RTTM file or directory")->required();
  score->add_option("--hyp", hyp_path, "hypothesis RTTM file or directory")->required();
  score->add_option("--uem", uem_path, "UEM scoring-region file");
  score->add_flag("--strict", strict, "escalate validation warnings to exit code 2");
  add_scoring_flags(score);

  std::string sweep_path;
  CLI::App* sensitivity =
      app.add_subcommand("sensitivity", "perturbation sweep on a synthetic reference");
  sensitivity->add_option("spec", sweep_path, "sweep spec JSON (see README)")->required();
  add_scoring_flags(sensitivity);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    config.metrics = diar::parse_metric_set(metric_list);

    if (score->parsed()) {
      const auto ref = diar::group_by_file(load_rttm_path(ref_path));
      const auto hyp = diar::group_by_file(load_rttm_path(hyp_path));
      std::map<std::string, diar::ScoringRegion> regions;
      if (!uem_path.empty()) {
        std::ifstream in(uem_path);
        if (!in) {
          throw std::runtime_error("cannot open " + uem_path);
        }
        regions = diar::parse_uem(in, uem_path);
      }

      std::vector<std::string> validation;
      for (const auto& [id, annotation] : ref) {
        (void)id;
        auto warnings = diar::duplicate_turn_warnings(annotation);
        validation.insert(validation.end(), warnings.begin(), warnings.end());
      }
      for (const auto& [id, annotation] : hyp) {
        (void)id;
        auto warnings = diar::duplicate_turn_warnings(annotation);
        validation.insert(validation.end(), warnings.begin(), warnings.end());
      }

      const diar::CorpusResult result = diar::score_corpus(ref, hyp, regions, config, jobs);

      for (const std::string& warning : validation) {
        std::cerr << "warning: " << warning << '\n';
      }
      for (const auto& file : result.files) {
        for (const std::string& warning : file.warnings) {
          std::cerr << "warning: " << warning << '\n';
        }
      }
      emit(format, result, config);
      if (strict && !validation.empty()) {
        std::cerr << "strict mode: " << validation.size() << " validation warning(s)\n";
        return 2;
      }
      return 0;
    }

    // sensitivity
    std::ifstream in(sweep_path);
    if (!in) {
      throw std::runtime_error("cannot open " + sweep_path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    diar::SweepSpec spec = diar::parse_sweep_spec(text.str());
    if (const char* env_seed = std::getenv("DIARSCORE_SEED")) {
      spec.seed = std::strtoull(env_seed, nullptr, 10);
    }
    const auto rows = diar::run_sensitivity(spec, config, jobs);
    if (format == "json") {
      std::cout << diar::render_sweep_json(spec, rows, config);
    } else if (format == "tsv") {
      std::cout << diar::render_sweep_tsv(rows, config);
    } else {
      std::cout << diar::render_sweep_table(rows, config);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
