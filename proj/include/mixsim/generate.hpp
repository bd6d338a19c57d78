// include/mixsim/generate.hpp

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

#ifndef MIXSIM_GENERATE_HPP_
#define MIXSIM_GENERATE_HPP_

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mixsim/manifest.hpp"
#include "mixsim/mixer.hpp"
#include "mixsim/planner.hpp"
#include "mixsim/pool.hpp"
#include "mixsim/rir.hpp"
#include "mixsim/room.hpp"
#include "mixsim/stats.hpp"
#include "mixsim/wav.hpp"

namespace mixsim {

struct GenerationConfig {
  std::string stats_path;
  std::string pool_manifest_path;
  std::string out_dir;
  std::vector<MixVersion> versions{MixVersion::kMax, MixVersion::kMin};
  std::vector<MixCondition> conditions{MixCondition::kAnechoic,
                                       MixCondition::kReverberant};
  int sample_rate = 16000;
  std::vector<int> speaker_counts{1, 2, 3, 4};
  int sessions_per_count = 1;
  uint64_t seed = 0;
  int workers = 1;
  std::array<double, 2> snr_range{-5.0, 5.0};
  double max_source_duration_s = 15.0;
  RoomStats room_stats;
  bool export_rirs = false;
  // Regenerate exactly one session index; byte-identical to the same
  // session's slice of a full run.
  std::optional<int> only_session;
};

inline void validate_generation_config(const GenerationConfig &config) {
  if (config.stats_path.empty() || config.pool_manifest_path.empty() ||
      config.out_dir.empty()) {
    throw std::invalid_argument(
        "generation config: stats_path, pool_manifest_path and out_dir are "
        "required");
  }
  if (config.versions.empty() || config.conditions.empty()) {
    throw std::invalid_argument(
        "generation config: need at least one version and one condition");
  }
  if (config.sample_rate != 8000 && config.sample_rate != 16000) {
    throw std::invalid_argument(
        "generation config: sample_rate must be 8000 or 16000");
  }
  if (config.speaker_counts.empty()) {
    throw std::invalid_argument("generation config: speaker_counts is empty");
  }
  for (int k : config.speaker_counts) {
    if (k < 1 || k > 4) {
      throw std::invalid_argument(
          "generation config: speaker counts must be in [1, 4]");
    }
  }
  if (config.sessions_per_count < 1) {
    throw std::invalid_argument(
        "generation config: sessions_per_count must be >= 1");
  }
  if (config.workers < 1) {
    throw std::invalid_argument("generation config: workers must be >= 1");
  }
  if (config.snr_range[0] > config.snr_range[1]) {
    throw std::invalid_argument("generation config: snr range is inverted");
  }
  validate_room_stats(config.room_stats);
}

// Applies keys present in j on top of base; flags set on the command line
// that also appear in the file are overridden by the file.
inline GenerationConfig generation_config_apply_json(GenerationConfig base,
                                                     const nlohmann::json &j) {
  if (j.contains("stats_path")) base.stats_path = j.at("stats_path");
  if (j.contains("pool_manifest_path")) {
    base.pool_manifest_path = j.at("pool_manifest_path");
  }
  if (j.contains("out_dir")) base.out_dir = j.at("out_dir");
  if (j.contains("versions")) {
    base.versions.clear();
    for (const auto &v : j.at("versions")) {
      base.versions.push_back(mix_version_from_string(v.get<std::string>()));
    }
  }
  if (j.contains("conditions")) {
    base.conditions.clear();
    for (const auto &c : j.at("conditions")) {
      base.conditions.push_back(
          mix_condition_from_string(c.get<std::string>()));
    }
  }
  if (j.contains("sample_rate")) base.sample_rate = j.at("sample_rate");
  if (j.contains("speaker_counts")) {
    base.speaker_counts = j.at("speaker_counts").get<std::vector<int>>();
  }
  if (j.contains("sessions_per_count")) {
    base.sessions_per_count = j.at("sessions_per_count");
  }
  if (j.contains("seed")) base.seed = j.at("seed").get<uint64_t>();
  if (j.contains("workers")) base.workers = j.at("workers");
  if (j.contains("snr_range")) {
    base.snr_range = {j.at("snr_range")[0].get<double>(),
                      j.at("snr_range")[1].get<double>()};
  }
  if (j.contains("max_source_duration_s")) {
    base.max_source_duration_s = j.at("max_source_duration_s");
  }
  if (j.contains("room")) {
    const auto &r = j.at("room");
    if (r.contains("dim_ranges")) {
      for (int axis = 0; axis < 3; ++axis) {
        base.room_stats.dim_ranges[axis] = {
            r.at("dim_ranges")[axis][0].get<double>(),
            r.at("dim_ranges")[axis][1].get<double>()};
      }
    }
    if (r.contains("t60_range")) {
      base.room_stats.t60_range = {r.at("t60_range")[0].get<double>(),
                                   r.at("t60_range")[1].get<double>()};
    }
  }
  if (j.contains("export_rirs")) base.export_rirs = j.at("export_rirs");
  return base;
}

struct GenerationReport {
  int sessions_requested = 0;
  int sessions_planned = 0;
  int sessions_rendered = 0;
  bool pool_exhausted = false;
  int rejected_too_long = 0;
  std::map<int, double> seconds_by_speaker_count;
  std::string manifest_path;
  std::string sot_path;
  std::string rttm_path;

  std::string summary() const {
    std::ostringstream out;
    out << "rendered " << sessions_rendered << "/" << sessions_requested
        << " sessions";
    if (pool_exhausted) out << " (pool exhausted)";
    for (const auto &[k, seconds] : seconds_by_speaker_count) {
      char buffer[64];
      std::snprintf(buffer, sizeof(buffer), " %dspk: %.3f h", k,
                    seconds / 3600.0);
      out << buffer;
    }
    return out.str();
  }
};

namespace detail {

inline std::string session_name(int index) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "sess_%06d", index);
  return buffer;
}

// Per-session sub-stream seeds. Planning, SNR assignment and room sampling
// draw from separate streams so each stage is reproducible on its own.
inline constexpr uint64_t kPlanSalt = 0x706c616e5f726e67ULL;
inline constexpr uint64_t kSnrSalt = 0x736e725f72616e67ULL;
inline constexpr uint64_t kRoomSalt = 0x726f6f6d5f726e67ULL;

struct SessionOutput {
  std::vector<SessionManifest> manifests;
  std::string sot_line;
  std::string rttm_text;
  double primary_duration_s = 0.0;
  int speaker_count = 0;
};

inline SessionOutput render_one_session(const GenerationConfig &config,
                                        const SessionPlan &planned) {
  const int fs = config.sample_rate;
  const uint64_t session_seed = planned.rng_seed;
  Rng rng_snr(splitmix64(session_seed ^ kSnrSalt));
  Rng rng_room(splitmix64(session_seed ^ kRoomSalt));

  std::map<std::string, std::vector<double>> cache;
  auto loader = [&](const Utterance &u) -> std::vector<double> {
    auto it = cache.find(u.utterance_id);
    if (it != cache.end()) return it->second;
    WavData wav = read_wav(u.audio_path);
    if (wav.sample_rate != fs) {
      throw std::runtime_error(
          "sample rate mismatch for utterance " + u.utterance_id + ": want " +
          std::to_string(fs) + " Hz, file has " +
          std::to_string(wav.sample_rate) + " Hz");
    }
    cache[u.utterance_id] = wav.samples;
    return wav.samples;
  };

  const SessionPlan plan =
      assign_snrs(planned, &rng_snr, config.snr_range, loader);

  bool want_reverberant = false;
  for (MixCondition c : config.conditions) {
    if (c == MixCondition::kReverberant) want_reverberant = true;
  }
  std::optional<RoomSpec> room;
  std::map<std::string, ImpulseResponse> rirs;
  if (want_reverberant) {
    room = sample_room(config.room_stats, plan.speakers_in_order(), &rng_room);
    for (const std::string &speaker : plan.speakers_in_order()) {
      rirs[speaker] = generate_rir(*room, speaker, fs);
    }
  }
  const std::function<ImpulseResponse(const std::string &)> rir_provider =
      [&rirs](const std::string &speaker) { return rirs.at(speaker); };

  const std::filesystem::path out_root(config.out_dir);
  SessionOutput output;
  output.speaker_count = plan.num_speakers;

  std::map<std::pair<std::string, std::string>, double> durations;
  for (MixVersion version : config.versions) {
    for (MixCondition condition : config.conditions) {
      MixtureBundle bundle =
          condition == MixCondition::kAnechoic
              ? render_session(plan, loader, fs, version)
              : render_reverberant(plan, *room, rir_provider, loader, fs,
                                   version);
      const std::string rel_dir = to_string(version) + "/" +
                                  to_string(condition) + "/" + plan.session_id;
      const std::filesystem::path dir = out_root / rel_dir;
      write_wav((dir / "mix.wav").string(), bundle.mixture, fs);
      std::map<std::string, std::string> source_paths;
      for (const auto &[speaker, track] : bundle.targets) {
        const std::string name = "s_" + speaker + ".wav";
        write_wav((dir / name).string(), track, fs);
        source_paths[speaker] = rel_dir + "/" + name;
      }
      durations[{to_string(version), to_string(condition)}] =
          static_cast<double>(bundle.mixture.size()) / fs;
      output.manifests.push_back(make_manifest(
          bundle, rel_dir + "/mix.wav", source_paths, session_seed));
    }
  }

  // Reported duration prefers the max version and the anechoic condition
  // among whatever was rendered.
  output.primary_duration_s = [&durations]() {
    for (const char *version : {"max", "min"}) {
      for (const char *condition : {"anechoic", "reverberant"}) {
        auto it = durations.find({version, condition});
        if (it != durations.end()) return it->second;
      }
    }
    return 0.0;
  }();

  output.sot_line = plan.session_id + "\t" + serialize_sot(plan);
  output.rttm_text = export_rttm(output.manifests.front());

  if (config.export_rirs && room) {
    for (const auto &[speaker, rir] : rirs) {
      write_wav(
          (out_root / "rirs" / plan.session_id / ("rir_" + speaker + ".wav"))
              .string(),
          rir.samples, fs);
    }
  }
  return output;
}

}  // namespace detail

// End-to-end corpus generation. Sessions are planned sequentially against
// the shared pool (so pool consumption never depends on scheduling), then
// rendered in parallel; session i derives all of its randomness from
// splitmix64(seed ^ i). Outputs: per-session WAV trees under
// {version}/{condition}/{session_id}/, a JSONL manifest, a tab-separated
// serialized-transcript file, and a reference RTTM.
inline GenerationReport generate_corpus(const GenerationConfig &config) {
  validate_generation_config(config);
  const DialogStats stats = load_dialog_stats(config.stats_path);
  PoolLoadResult loaded =
      load_pool_manifest(config.pool_manifest_path,
                         config.max_source_duration_s);
  UtterancePool &pool = loaded.pool;

  const int total = static_cast<int>(config.speaker_counts.size()) *
                    config.sessions_per_count;
  if (config.only_session &&
      (*config.only_session < 0 || *config.only_session >= total)) {
    throw std::invalid_argument("only_session index out of range");
  }
  const int last_needed =
      config.only_session ? *config.only_session : total - 1;

  PlannerConfig planner_config;
  planner_config.snr_range = config.snr_range;
  planner_config.max_source_duration_s = config.max_source_duration_s;
  planner_config.speaker_counts = config.speaker_counts;
  planner_config.sessions_per_count = config.sessions_per_count;
  planner_config.seed = config.seed;

  std::vector<SessionPlan> plans;
  bool exhausted = false;
  for (int i = 0; i <= last_needed; ++i) {
    const int k = config.speaker_counts[i / config.sessions_per_count];
    const uint64_t session_seed =
        splitmix64(config.seed ^ static_cast<uint64_t>(i));
    Rng rng_plan(splitmix64(session_seed ^ detail::kPlanSalt));
    try {
      SessionPlan plan = plan_session(&pool, stats, k, &rng_plan,
                                      planner_config, detail::session_name(i));
      plan.rng_seed = session_seed;
      plans.push_back(std::move(plan));
    } catch (const PoolExhaustedError &) {
      exhausted = true;
      break;
    }
  }
  if (config.only_session &&
      static_cast<int>(plans.size()) <= *config.only_session) {
    throw std::runtime_error(
        "cannot regenerate session " + std::to_string(*config.only_session) +
        ": pool exhausted after " + std::to_string(plans.size()) +
        " sessions");
  }

  std::vector<int> todo;
  if (config.only_session) {
    todo.push_back(*config.only_session);
  } else {
    for (int i = 0; i < static_cast<int>(plans.size()); ++i) todo.push_back(i);
  }

  std::vector<detail::SessionOutput> outputs(plans.size());
  std::atomic<size_t> cursor{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    while (true) {
      const size_t slot = cursor.fetch_add(1);
      if (slot >= todo.size()) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      try {
        outputs[todo[slot]] =
            detail::render_one_session(config, plans[todo[slot]]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const int thread_count =
      std::max(1, std::min<int>(config.workers,
                                static_cast<int>(todo.size())));
  std::vector<std::thread> threads;
  for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
  for (std::thread &t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);

  const std::filesystem::path out_root(config.out_dir);
  std::filesystem::create_directories(out_root);

  GenerationReport report;
  report.sessions_requested = total;
  report.sessions_planned = static_cast<int>(plans.size());
  report.sessions_rendered = static_cast<int>(todo.size());
  report.pool_exhausted = exhausted;
  report.rejected_too_long = loaded.rejected_too_long;
  report.manifest_path = (out_root / "manifests.jsonl").string();
  report.sot_path = (out_root / "sot.txt").string();
  report.rttm_path = (out_root / "ref.rttm").string();

  std::vector<SessionManifest> all_manifests;
  std::ofstream sot(report.sot_path, std::ios::trunc);
  std::ofstream rttm(report.rttm_path, std::ios::trunc);
  if (!sot || !rttm) {
    throw std::runtime_error("cannot write outputs under " + config.out_dir);
  }
  for (int index : todo) {
    const detail::SessionOutput &output = outputs[index];
    for (const SessionManifest &m : output.manifests) {
      all_manifests.push_back(m);
    }
    sot << output.sot_line << "\n";
    rttm << output.rttm_text;
    report.seconds_by_speaker_count[output.speaker_count] +=
        output.primary_duration_s;
  }
  write_manifest(all_manifests, report.manifest_path);
  return report;
}

}  // namespace mixsim

#endif  // MIXSIM_GENERATE_HPP_
