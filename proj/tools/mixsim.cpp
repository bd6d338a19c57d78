// tools/mixsim.cpp

// Copyright 2025  The mixsim authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mixsim/generate.hpp"
#include "mixsim/score.hpp"
#include "mixsim/stats.hpp"

namespace {

// Exit codes: 0 success, 1 usage, 2 data error, 3 partial generation.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitPartial = 3;

int default_workers() {
  if (const char *env = std::getenv("MIXSIM_WORKERS")) {
    const int value = std::atoi(env);
    if (value >= 1) return value;
  }
  return 1;
}

int run_stats(const std::vector<std::string> &rttm_paths,
              const std::string &out_path) {
  std::vector<mixsim::Segment> segments;
  for (const std::string &path : rttm_paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open rttm file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    for (mixsim::Segment &s : mixsim::parse_rttm(buffer.str())) {
      segments.push_back(std::move(s));
    }
  }
  const mixsim::DialogStats stats = mixsim::derive_dialog_stats(segments);
  mixsim::save_dialog_stats(stats, out_path);
  std::cout << "wrote " << out_path << " (same-speaker pauses: "
            << stats.same_speaker_pause.count()
            << ", cross-speaker pauses: "
            << stats.different_speaker_pause.count()
            << ", overlaps: " << stats.overlap_duration.count()
            << ", p_overlap: " << stats.overlap_probability << ")\n";
  return kExitOk;
}

void write_report(const nlohmann::json &report, const std::string &out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write report: " + out_path);
  out << report.dump(2) << "\n";
  std::cout << "wrote " << out_path << "\n";
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"multi-talker overlapped-speech corpus simulation and scoring"};
  app.require_subcommand(1);

  // stats
  auto *stats_cmd = app.add_subcommand(
      "stats", "derive turn-taking statistics from RTTM segmentations");
  std::vector<std::string> rttm_paths;
  std::string stats_out;
  stats_cmd->add_option("rttm", rttm_paths, "input RTTM file(s)")
      ->required()
      ->check(CLI::ExistingFile);
  stats_cmd->add_option("--out", stats_out, "output stats JSON path")
      ->required();

  // generate
  auto *generate_cmd =
      app.add_subcommand("generate", "synthesize a mixture corpus");
  mixsim::GenerationConfig config;
  config.workers = default_workers();
  std::string config_path;
  std::vector<std::string> version_names{"max", "min"};
  std::vector<std::string> condition_names{"anechoic", "reverberant"};
  std::vector<double> snr_range_flag;
  int only_session_flag = -1;
  generate_cmd->add_option("--stats", config.stats_path,
                           "turn-taking statistics JSON");
  generate_cmd->add_option("--pool", config.pool_manifest_path,
                           "pool manifest JSONL");
  generate_cmd->add_option("--out", config.out_dir, "output directory");
  generate_cmd->add_option("--versions", version_names,
                           "subset of {max,min}")
      ->delimiter(',');
  generate_cmd->add_option("--conditions", condition_names,
                           "subset of {anechoic,reverberant}")
      ->delimiter(',');
  generate_cmd->add_option("--sample-rate", config.sample_rate,
                           "8000 or 16000");
  generate_cmd->add_option("--speaker-counts", config.speaker_counts,
                           "speaker counts per block of sessions")
      ->delimiter(',');
  generate_cmd->add_option("--sessions-per-count", config.sessions_per_count,
                           "sessions per speaker count");
  generate_cmd->add_option("--seed", config.seed, "corpus seed");
  generate_cmd->add_option("--workers", config.workers,
                           "render threads (default $MIXSIM_WORKERS or 1)");
  generate_cmd->add_option("--snr-range", snr_range_flag,
                           "lo,hi in dB (default -5,5)")
      ->delimiter(',')
      ->expected(2);
  generate_cmd->add_option("--max-source-duration",
                           config.max_source_duration_s,
                           "reject utterances longer than this many seconds");
  generate_cmd->add_flag("--export-rirs", config.export_rirs,
                         "also write impulse responses as WAV");
  generate_cmd->add_option("--session-index", only_session_flag,
                           "regenerate exactly this session index");
  generate_cmd->add_option("--config", config_path,
                           "JSON config; keys present override flags");

  // score
  auto *score_cmd =
      app.add_subcommand("score", "score system outputs against a manifest");
  std::string kind, ref_path, hyp_path, report_out;
  mixsim::ScoreOptions score_options;
  std::string version_filter, condition_filter;
  bool no_lowercase = false, keep_punctuation = false, no_overlap = false;
  score_cmd->add_option("--kind", kind, "separation|asr|diarization")
      ->required()
      ->check(CLI::IsMember({"separation", "asr", "diarization"}));
  score_cmd->add_option("--ref", ref_path, "reference manifest JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  score_cmd
      ->add_option("--hyp", hyp_path,
                   "hypothesis input (directory of est WAVs, transcript "
                   "JSONL/serialized text, or RTTM)")
      ->required();
  score_cmd->add_option("--out", report_out, "report JSON (default stdout)");
  score_cmd->add_option("--collar", score_options.collar,
                        "diarization no-score collar in seconds");
  score_cmd->add_flag("--no-overlap-scoring", no_overlap,
                      "exclude regions with overlapped reference speech");
  score_cmd->add_flag("--skip-missing", score_options.skip_missing,
                      "skip sessions absent from the hypothesis");
  score_cmd->add_flag("--no-lowercase", no_lowercase,
                      "keep casing when tokenizing");
  score_cmd->add_flag("--keep-punctuation", keep_punctuation,
                      "keep punctuation when tokenizing");
  score_cmd->add_option("--sc-token", score_options.sc_token,
                        "speaker-change token (default <sc>)");
  score_cmd->add_option("--version", version_filter,
                        "only score this version (max|min)");
  score_cmd->add_option("--condition", condition_filter,
                        "only score this condition (anechoic|reverberant)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (stats_cmd->parsed()) {
      return run_stats(rttm_paths, stats_out);
    }

    if (generate_cmd->parsed()) {
      config.versions.clear();
      for (const std::string &v : version_names) {
        config.versions.push_back(mixsim::mix_version_from_string(v));
      }
      config.conditions.clear();
      for (const std::string &c : condition_names) {
        config.conditions.push_back(mixsim::mix_condition_from_string(c));
      }
      if (snr_range_flag.size() == 2) {
        config.snr_range = {snr_range_flag[0], snr_range_flag[1]};
      }
      if (only_session_flag >= 0) config.only_session = only_session_flag;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
          throw std::runtime_error("cannot open config: " + config_path);
        }
        nlohmann::json j;
        in >> j;
        config = mixsim::generation_config_apply_json(config, j);
      }
      const mixsim::GenerationReport report = mixsim::generate_corpus(config);
      std::cout << report.summary() << "\n";
      std::cout << "manifest: " << report.manifest_path << "\n";
      return report.pool_exhausted ? kExitPartial : kExitOk;
    }

    if (score_cmd->parsed()) {
      score_options.normalization.lowercase = !no_lowercase;
      score_options.normalization.strip_punctuation = !keep_punctuation;
      score_options.score_overlap = !no_overlap;
      if (!version_filter.empty()) {
        score_options.version_filter = version_filter;
      }
      if (!condition_filter.empty()) {
        score_options.condition_filter = condition_filter;
      }
      nlohmann::json report;
      if (kind == "separation") {
        report = mixsim::score_separation(ref_path, hyp_path, score_options);
      } else if (kind == "asr") {
        report = mixsim::score_asr(ref_path, hyp_path, score_options);
      } else {
        report = mixsim::score_diarization(ref_path, hyp_path, score_options);
      }
      write_report(report, report_out);
      return kExitOk;
    }
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
