// tests/acceptance/acceptance_main.cpp

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

// End-to-end verification: one check per release gate, each printing a
// single PASS/FAIL line. Exits nonzero if any gate fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "../corpus_fixture.hpp"
#include "../test_util.hpp"
#include "mixsim/der.hpp"
#include "mixsim/generate.hpp"
#include "mixsim/manifest.hpp"
#include "mixsim/metrics.hpp"
#include "mixsim/mixer.hpp"
#include "mixsim/planner.hpp"
#include "mixsim/rir.hpp"
#include "mixsim/score.hpp"
#include "mixsim/wer.hpp"

namespace {

using namespace mixsim;
using testutil::make_stats;
using testutil::make_utt;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string &what) {
  if (!condition) throw Failure(what);
}

std::string fmt(double x) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.6g", x);
  return buffer;
}

double seconds_since(
    const std::chrono::steady_clock::time_point &start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

// In-memory random session shared by the additivity and SNR gates.
struct RenderedCase {
  SessionPlan plan;
  testutil::MapLoader loader;
  RoomSpec room;
  std::map<std::string, ImpulseResponse> rirs;
};

RenderedCase make_random_session(uint64_t seed, int fs) {
  Rng rng(seed);
  const int k = 1 + static_cast<int>(rng.uniform_index(4));
  const DialogStats stats =
      make_stats({0.05, 0.2}, {0.1, 0.4}, {0.05, 0.25}, 0.5);
  RenderedCase c;
  UtterancePool pool;
  for (int s = 0; s < k; ++s) {
    const std::string speaker = "spk" + std::to_string(s);
    for (int u = 0; u < 2; ++u) {
      const std::string id = speaker + "_" + std::to_string(u);
      const size_t n =
          static_cast<size_t>(fs / 4 + rng.uniform_index(fs / 4));
      c.loader.audio[id] =
          testutil::make_noise(n, rng.next_u64(), 0.1 + 0.2 * rng.uniform());
      pool.add(make_utt(id, speaker, static_cast<double>(n) / fs));
    }
  }
  PlannerConfig config;
  c.plan = plan_session(&pool, stats, k, &rng, config,
                        "case_" + std::to_string(seed));
  c.plan = assign_snrs(c.plan, &rng, {-5.0, 5.0}, c.loader);
  RoomStats room_stats;
  room_stats.dim_ranges = {{{3.0, 6.0}, {3.0, 6.0}, {2.5, 3.0}}};
  room_stats.t60_range = {0.2, 0.3};
  c.room = sample_room(room_stats, c.plan.speakers_in_order(), &rng);
  for (const std::string &speaker : c.plan.speakers_in_order()) {
    c.rirs[speaker] = generate_rir(c.room, speaker, fs);
  }
  return c;
}

// Decay-time oracle: Schroeder backward integration, least-squares line over
// the -5..-35 dB stretch, extrapolated to -60 dB.
double schroeder_t60(const std::vector<double> &h, int fs) {
  const size_t n = h.size();
  std::vector<double> energy(n + 1, 0.0);
  for (size_t i = n; i-- > 0;) energy[i] = energy[i + 1] + h[i] * h[i];
  const double total = energy[0];
  double st = 0.0, sd = 0.0, stt = 0.0, std_ = 0.0;
  size_t count = 0;
  for (size_t i = 0; i < n; ++i) {
    if (energy[i] <= 0.0) break;
    const double db = 10.0 * std::log10(energy[i] / total);
    if (db > -5.0) continue;
    if (db < -35.0) break;
    const double t = static_cast<double>(i) / fs;
    st += t;
    sd += db;
    stt += t * t;
    std_ += t * db;
    ++count;
  }
  if (count < 2) return 0.0;
  const double slope = (count * std_ - st * sd) / (count * stt - st * st);
  return -60.0 / slope;
}

// Independent exhaustive pairing scorer used to cross-check upit_assign.
void enumerate_assignments(const std::vector<std::vector<double>> &score,
                           std::vector<int> *current,
                           std::vector<bool> *used, std::vector<int> *best,
                           double *best_mean) {
  const size_t n = score.size();
  if (current->size() == n) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) total += score[i][(*current)[i]];
    const double mean = total / static_cast<double>(n);
    if (mean > *best_mean) {
      *best_mean = mean;
      *best = *current;
    }
    return;
  }
  for (size_t j = 0; j < n; ++j) {
    if ((*used)[j]) continue;
    (*used)[j] = true;
    current->push_back(static_cast<int>(j));
    enumerate_assignments(score, current, used, best, best_mean);
    current->pop_back();
    (*used)[j] = false;
  }
}

}  // namespace

int main() {
  int failed = 0;
  auto criterion = [&failed](int id, const std::string &name,
                             const std::function<void()> &body) {
    const auto start = std::chrono::steady_clock::now();
    try {
      body();
      std::printf("PASS  criterion %2d: %s (%.2fs)\n", id, name.c_str(),
                  seconds_since(start));
    } catch (const std::exception &e) {
      ++failed;
      std::printf("FAIL  criterion %2d: %s: %s\n", id, name.c_str(),
                  e.what());
    }
    std::fflush(stdout);
  };

  // Shared corpus for the determinism and end-to-end gates.
  testutil::TempDir shared_root("acceptance");
  std::string shared_manifest, shared_sot, shared_out_dir;

  criterion(1, "timeline hand trace with point-mass statistics", [&]() {
    const auto start = std::chrono::steady_clock::now();
    const DialogStats stats = make_stats({0.3}, {0.7}, {2.0}, 1.0);
    Rng rng(11);
    const SessionPlan plan = place_sequence(
        "trace", {make_utt("u1", "spkA", 5.0), make_utt("u2", "spkB", 4.0)},
        stats, 2, &rng);
    require(plan.placements.size() == 2, "expected two placements");
    require(plan.placements[0].start == 0.0,
            "first start is " + fmt(plan.placements[0].start) + ", want 0");
    require(plan.placements[1].start == 3.0,
            "second start is " + fmt(plan.placements[1].start) + ", want 3");
    require(seconds_since(start) < 1.0, "trace took longer than 1 s");
  });

  criterion(2, "planned sessions recover the source statistics", [&]() {
    const auto start = std::chrono::steady_clock::now();
    const double p_overlap = 0.5;
    const DialogStats stats =
        make_stats({0.4, 0.8}, {1.0, 2.0}, {1.0, 2.0}, p_overlap);
    UtterancePool pool;
    for (const std::string speaker : {"spkA", "spkB"}) {
      for (int i = 0; i < 3000; ++i) {
        pool.add(make_utt(speaker + "_" + std::to_string(i), speaker,
                          4.0 + (i % 5)));
      }
    }
    Rng rng(20240915);
    PlannerConfig config;
    int changes = 0, overlapped = 0;
    double overlap_sum = 0.0;
    for (int session = 0; session < 1000; ++session) {
      const SessionPlan plan = plan_session(&pool, stats, 2, &rng, config);
      for (size_t i = 1; i < plan.placements.size(); ++i) {
        const auto &prev = plan.placements[i - 1];
        const auto &cur = plan.placements[i];
        if (cur.utterance.speaker_id == prev.utterance.speaker_id) continue;
        ++changes;
        const double gap = cur.start - prev.end();
        if (gap < 0.0) {
          ++overlapped;
          overlap_sum += -gap;
        }
      }
    }
    require(changes == 1000, "expected one speaker change per session");
    const double p_hat = static_cast<double>(overlapped) / changes;
    require(std::abs(p_hat - p_overlap) <= 0.05,
            "recovered overlap probability " + fmt(p_hat));
    const double mean = overlap_sum / overlapped;
    require(std::abs(mean - 1.5) <= 0.075,
            "recovered mean overlap " + fmt(mean) + ", want 1.5 +- 5%");
    require(seconds_since(start) < 60.0, "took longer than 1 minute");
  });

  criterion(3, "mixture equals the sum of its targets", [&]() {
    const int fs = 16000;
    for (int trial = 0; trial < 50; ++trial) {
      RenderedCase c = make_random_session(5000 + trial, fs);
      const auto provider =
          std::function<ImpulseResponse(const std::string &)>(
              [&c](const std::string &speaker) { return c.rirs.at(speaker); });
      for (MixVersion version : {MixVersion::kMax, MixVersion::kMin}) {
        for (MixCondition condition :
             {MixCondition::kAnechoic, MixCondition::kReverberant}) {
          const MixtureBundle bundle =
              condition == MixCondition::kAnechoic
                  ? render_session(c.plan, c.loader, fs, version)
                  : render_reverberant(c.plan, c.room, provider, c.loader,
                                       fs, version);
          double max_abs = 0.0, max_err = 0.0;
          for (size_t i = 0; i < bundle.mixture.size(); ++i) {
            double sum = 0.0;
            for (const auto &[speaker, track] : bundle.targets) {
              sum += track[i];
            }
            max_err = std::max(max_err, std::abs(bundle.mixture[i] - sum));
            max_abs = std::max(max_abs, std::abs(bundle.mixture[i]));
          }
          require(max_err < 1e-10 * std::max(1.0, max_abs),
                  "additivity residual " + fmt(max_err) + " in trial " +
                      std::to_string(trial));
        }
      }
    }
  });

  criterion(4, "rendered per-speaker SNR matches the assigned value", [&]() {
    const int fs = 16000;
    for (int trial = 0; trial < 50; ++trial) {
      RenderedCase c = make_random_session(9000 + trial, fs);
      const MixtureBundle bundle =
          render_session(c.plan, c.loader, fs, MixVersion::kMax);
      std::map<std::string, double> power_sum, snr_of;
      std::map<std::string, size_t> count;
      for (const auto &p : c.plan.placements) {
        const std::vector<double> *track = nullptr;
        for (const auto &[speaker, t] : bundle.targets) {
          if (speaker == p.utterance.speaker_id) track = &t;
        }
        const size_t offset =
            static_cast<size_t>(std::llround(p.start * fs));
        const size_t n = c.loader.audio.at(p.utterance.utterance_id).size();
        for (size_t i = offset; i < offset + n && i < track->size(); ++i) {
          power_sum[p.utterance.speaker_id] += (*track)[i] * (*track)[i];
          ++count[p.utterance.speaker_id];
        }
        snr_of[p.utterance.speaker_id] = p.snr_db;
      }
      const std::string reference = c.plan.speakers_in_order().front();
      const double ref_power = power_sum[reference] / count[reference];
      for (const auto &[speaker, sum] : power_sum) {
        const double measured =
            10.0 * std::log10(ref_power / (sum / count[speaker]));
        require(std::abs(measured - snr_of[speaker]) < 0.01,
                "speaker " + speaker + " measured " + fmt(measured) +
                    " dB, assigned " + fmt(snr_of[speaker]));
      }
    }
  });

  criterion(5, "impulse responses decay at the requested rate", [&]() {
    const int fs = 16000;
    Rng rng(31415);
    for (int trial = 0; trial < 20; ++trial) {
      const RoomSpec room = sample_room(RoomStats{}, {"spk"}, &rng);
      const ImpulseResponse rir = generate_rir(room, "spk", fs);
      const double measured = schroeder_t60(rir.samples, fs);
      require(std::abs(measured - room.t60) <= 0.2 * room.t60,
              "room " + std::to_string(trial) + ": measured T60 " +
                  fmt(measured) + " vs target " + fmt(room.t60));

      const double direct_distance =
          distance(room.sources.at("spk"), room.listener);
      const double delay = direct_distance / kSpeedOfSound * fs;
      const int expected = static_cast<int>(std::llround(delay));
      for (int i = 0; i < expected - 42; ++i) {
        require(rir.samples[i] == 0.0,
                "room " + std::to_string(trial) +
                    ": energy before the direct arrival");
      }
      // First tap reaching half the free-field direct amplitude; the
      // fractional-delay kernel puts at least 0.63 of it on a tap at the
      // geometric delay, and nothing earlier can reach it.
      const double direct_amplitude =
          1.0 / (4.0 * M_PI * direct_distance);
      int detected = -1;
      for (int i = std::max(0, expected - 8);
           i <= expected + 8 && i < static_cast<int>(rir.samples.size());
           ++i) {
        if (std::abs(rir.samples[i]) >= 0.5 * direct_amplitude) {
          detected = i;
          break;
        }
      }
      require(std::abs(detected - expected) <= 1,
              "room " + std::to_string(trial) + ": first arrival at " +
                  std::to_string(detected) + ", want " +
                  std::to_string(expected));
    }
  });

  criterion(6, "scale-invariant ratio reproduces the hand-worked value",
            [&]() {
    const std::vector<double> reference = {1.0, -1.0, 0.0};
    const std::vector<double> estimate = {1.0, 0.0, -1.0};
    const double value = si_snr(estimate, reference);
    require(std::abs(value - (-4.7712125)) < 1e-3,
            "got " + fmt(value) + ", want -4.771");
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
      const auto ref = testutil::make_noise(400, rng.next_u64());
      const auto est = testutil::make_noise(400, rng.next_u64());
      const double base = si_snr(est, ref);
      for (double alpha : {0.1, 10.0}) {
        std::vector<double> scaled(est.size());
        for (size_t i = 0; i < est.size(); ++i) scaled[i] = alpha * est[i];
        require(std::abs(si_snr(scaled, ref) - base) < 1e-6,
                "scale invariance off at alpha " + fmt(alpha));
      }
    }
  });

  criterion(7, "permutation search matches an exhaustive scorer", [&]() {
    Rng rng(27182818);
    for (int n = 2; n <= 4; ++n) {
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> estimates, references;
        for (int i = 0; i < n; ++i) {
          references.push_back(testutil::make_noise(96, rng.next_u64()));
        }
        for (int i = 0; i < n; ++i) {
          std::vector<double> estimate(96, 0.0);
          for (int j = 0; j < n; ++j) {
            const double w = (i == j) ? 1.0 : 0.4 * rng.uniform();
            for (size_t t = 0; t < estimate.size(); ++t) {
              estimate[t] += w * references[j][t];
            }
          }
          estimates.push_back(std::move(estimate));
        }
        const PermutationResult fast = upit_assign(estimates, references);
        std::vector<std::vector<double>> score(
            n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            score[i][j] = si_snr(estimates[i], references[j]);
          }
        }
        std::vector<int> current, best;
        std::vector<bool> used(n, false);
        double best_mean = -1e300;
        enumerate_assignments(score, &current, &used, &best, &best_mean);
        require(fast.assignment == best,
                "assignment mismatch at n=" + std::to_string(n) + " trial " +
                    std::to_string(trial));
      }
    }
  });

  criterion(8, "concatenated minimum-permutation word error rate", [&]() {
    const std::vector<std::string> refs = {"hello world", "good morning"};
    const auto permuted =
        cpwer(refs, std::vector<std::string>{"good morning", "hello world"});
    require(permuted.rate == 0.0,
            "permuted perfect hypothesis scored " + fmt(permuted.rate));
    const auto one_sub =
        cpwer(refs, std::vector<std::string>{"hello word", "good morning"});
    require(one_sub.rate == 0.25,
            "single substitution scored " + fmt(one_sub.rate));

    // Pooled aggregation: 1 + 3 errors over 8 + 8 reference words = 25%.
    testutil::TempDir dir("cpwer");
    std::vector<SessionManifest> manifests;
    for (int i = 0; i < 2; ++i) {
      SessionManifest m;
      m.session_id = "s" + std::to_string(i);
      m.condition = "anechoic";
      m.version = "max";
      m.sample_rate = 16000;
      m.mixture_path = "unused.wav";
      SourceEntry source;
      source.speaker_id = "spkA";
      UtteranceEntry u;
      u.utterance_id = "u";
      u.start = 0.0;
      u.duration = 1.0;
      u.transcript = "w1 w2 w3 w4 w5 w6 w7 w8";
      source.utterances.push_back(u);
      m.sources.push_back(source);
      manifests.push_back(std::move(m));
    }
    const std::string ref_path = (dir.path() / "ref.jsonl").string();
    write_manifest(manifests, ref_path);
    const std::string hyp_path = (dir.path() / "hyp.jsonl").string();
    {
      std::ofstream out(hyp_path);
      out << nlohmann::json{{"session_id", "s0"},
                            {"streams", {"w1 w2 w3 w4 w5 w6 w7 X"}}}
                 .dump()
          << "\n";
      out << nlohmann::json{{"session_id", "s1"},
                            {"streams", {"A B C w4 w5 w6 w7 w8"}}}
                 .dump()
          << "\n";
    }
    const auto report = score_asr(ref_path, hyp_path, ScoreOptions{});
    const double aggregate = report.at("aggregate").at("cpwer").get<double>();
    require(aggregate == 0.25,
            "pooled aggregate scored " + fmt(aggregate) + ", want 0.25");
  });

  criterion(9, "diarization error rate on the worked examples", [&]() {
    Segment ref_seg;
    ref_seg.recording_id = "r";
    ref_seg.speaker_id = "A";
    ref_seg.onset = 0.0;
    ref_seg.duration = 10.0;
    Segment hyp_seg = ref_seg;
    hyp_seg.speaker_id = "1";
    hyp_seg.duration = 8.0;

    const auto perfect = der({ref_seg}, {ref_seg});
    require(perfect.der == 0.0, "perfect hypothesis scored " +
                                    fmt(perfect.der));
    const auto empty = der({ref_seg}, {});
    require(empty.der == 1.0,
            "empty hypothesis scored " + fmt(empty.der));
    const auto partial = der({ref_seg}, {hyp_seg});
    require(partial.der == 0.2,
            "partial coverage scored " + fmt(partial.der) + ", want 0.2");
  });

  criterion(10, "serialized transcripts and ground-truth round trips", [&]() {
    SessionPlan plan;
    plan.session_id = "sess";
    double t = 0.0;
    int i = 0;
    for (const auto &[speaker, text] :
         std::vector<std::pair<std::string, std::string>>{
             {"spkA", "hi"}, {"spkB", "yes"}, {"spkA", "ok"}}) {
      PlacedUtterance p;
      p.utterance = make_utt("u" + std::to_string(i++), speaker, 1.0, text);
      p.start = t;
      t += 1.25;
      plan.placements.push_back(p);
    }
    plan.num_speakers = 2;
    const std::string sot = serialize_sot(plan);
    require(sot == "hi <sc> yes <sc> ok", "serialized to '" + sot + "'");

    MixtureBundle bundle;
    bundle.plan = plan;
    bundle.version = MixVersion::kMax;
    bundle.condition = MixCondition::kAnechoic;
    bundle.sample_rate = 16000;
    bundle.targets.emplace_back("spkA", std::vector<double>{0.0});
    bundle.targets.emplace_back("spkB", std::vector<double>{0.0});
    const SessionManifest manifest =
        make_manifest(bundle, "mix.wav",
                      {{"spkA", "s_spkA.wav"}, {"spkB", "s_spkB.wav"}}, 7);

    testutil::TempDir dir("roundtrip");
    const std::string path = (dir.path() / "m.jsonl").string();
    write_manifest({manifest}, path);
    const auto restored = read_manifest(path);
    require(restored.size() == 1, "manifest line count");
    require(manifest_to_json(restored[0]).dump() ==
                manifest_to_json(manifest).dump(),
            "manifest round trip changed fields");

    const auto segments = parse_rttm(export_rttm(manifest));
    require(segments.size() == 3, "rttm line count");
    std::vector<std::pair<double, std::string>> expected = {
        {0.0, "spkA"}, {1.25, "spkB"}, {2.5, "spkA"}};
    for (size_t s = 0; s < segments.size(); ++s) {
      require(segments[s].speaker_id == expected[s].second,
              "rttm speaker order");
      require(std::abs(segments[s].onset - expected[s].first) <= 1e-3,
              "rttm onset quantization");
    }
  });

  criterion(11, "byte-identical regeneration at any worker count", [&]() {
    auto config_a = testutil::small_corpus_config(
        shared_root.path() / "a", {2, 3}, 4, 424242, 8, 6);
    auto config_b = testutil::small_corpus_config(
        shared_root.path() / "b", {2, 3}, 4, 424242, 8, 6);
    auto config_c = testutil::small_corpus_config(
        shared_root.path() / "c", {2, 3}, 4, 424242, 8, 6);
    std::filesystem::create_directories(shared_root.path() / "a");
    config_a.workers = 1;
    config_b.workers = 3;
    config_c.only_session = 7;

    const GenerationReport report_a = generate_corpus(config_a);
    const GenerationReport report_b = generate_corpus(config_b);
    const GenerationReport report_c = generate_corpus(config_c);
    shared_manifest = report_a.manifest_path;
    shared_sot = report_a.sot_path;
    shared_out_dir = config_a.out_dir;

    const auto files_a = testutil::list_tree(config_a.out_dir);
    require(files_a == testutil::list_tree(config_b.out_dir),
            "file sets differ between worker counts");
    for (const auto &rel : files_a) {
      require(testutil::read_file_bytes(
                  std::filesystem::path(config_a.out_dir) / rel) ==
                  testutil::read_file_bytes(
                      std::filesystem::path(config_b.out_dir) / rel),
              "bytes differ between worker counts: " + rel);
    }

    int compared = 0;
    for (const auto &rel : testutil::list_tree(config_c.out_dir)) {
      if (rel.find("sess_000007") == std::string::npos) continue;
      require(testutil::read_file_bytes(
                  std::filesystem::path(config_c.out_dir) / rel) ==
                  testutil::read_file_bytes(
                      std::filesystem::path(config_a.out_dir) / rel),
              "regenerated session differs: " + rel);
      ++compared;
    }
    require(compared > 0, "regeneration produced no session files");

    auto session_lines = [](const std::string &path) {
      std::vector<std::string> lines;
      std::ifstream in(path);
      std::string line;
      while (std::getline(in, line)) {
        if (line.find("sess_000007") != std::string::npos) {
          lines.push_back(line);
        }
      }
      return lines;
    };
    require(session_lines(report_c.manifest_path) ==
                session_lines(report_a.manifest_path),
            "manifest slice differs for the regenerated session");
  });

  criterion(12, "oracle outputs close the generate-and-score loop", [&]() {
    require(!shared_manifest.empty(),
            "depends on the corpus from criterion 11");
    ScoreOptions options;
    options.version_filter = "max";
    options.condition_filter = "anechoic";

    testutil::TempDir hyp_root("oracle");
    const auto base = std::filesystem::path(shared_manifest).parent_path();
    std::ofstream hyp_text((hyp_root.path() / "hyp.jsonl").string());
    for (const auto &m : read_manifest(shared_manifest)) {
      if (m.version != "max" || m.condition != "anechoic") continue;
      nlohmann::json streams = nlohmann::json::array();
      for (size_t i = 0; i < m.sources.size(); ++i) {
        const WavData target =
            read_wav((base / m.sources[i].path).string());
        write_wav((hyp_root.path() / "est" / m.session_id /
                   ("est_" + std::to_string(i) + ".wav"))
                      .string(),
                  target.samples, target.sample_rate);
        std::string stream;
        for (const auto &u : m.sources[i].utterances) {
          if (!stream.empty()) stream += ' ';
          stream += u.transcript;
        }
        streams.push_back(stream);
      }
      hyp_text << nlohmann::json{{"session_id", m.session_id},
                                 {"streams", streams}}
                      .dump()
               << "\n";
    }
    hyp_text.close();

    const auto separation = score_separation(
        shared_manifest, (hyp_root.path() / "est").string(), options);
    require(separation.at("aggregate").at("delta_si_sdr").get<double>() > 0.0,
            "aggregate improvement is not positive");
    for (const auto &session : separation.at("per_session")) {
      require(session.at("delta_si_sdr").get<double>() > 0.0,
              "no improvement for " +
                  session.at("session_id").get<std::string>());
      const auto assignment =
          session.at("assignment").get<std::vector<int>>();
      for (size_t i = 0; i < assignment.size(); ++i) {
        require(assignment[i] == static_cast<int>(i),
                "non-identity pairing for " +
                    session.at("session_id").get<std::string>());
      }
    }

    const auto asr = score_asr(
        shared_manifest, (hyp_root.path() / "hyp.jsonl").string(), options);
    const double cpwer_value =
        asr.at("aggregate").at("cpwer").get<double>();
    require(cpwer_value == 0.0,
            "reference transcripts scored " + fmt(cpwer_value));
  });

  if (failed == 0) {
    std::printf("all 12 criteria passed\n");
  } else {
    std::printf("%d criteria FAILED\n", failed);
  }
  return failed == 0 ? 0 : 1;
}
