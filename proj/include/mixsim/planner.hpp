// include/mixsim/planner.hpp

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

#ifndef MIXSIM_PLANNER_HPP_
#define MIXSIM_PLANNER_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mixsim/gain.hpp"
#include "mixsim/pool.hpp"
#include "mixsim/rng.hpp"
#include "mixsim/stats.hpp"

namespace mixsim {

struct PlannerConfig {
  std::array<double, 2> snr_range{-5.0, 5.0};
  double max_source_duration_s = 15.0;
  std::vector<int> speaker_counts{1, 2, 3, 4};
  int sessions_per_count = 1;
  uint64_t seed = 0;
};

inline PlannerConfig planner_config_from_json(const nlohmann::json &j) {
  PlannerConfig config;
  if (j.contains("snr_range")) {
    config.snr_range = {j.at("snr_range")[0].get<double>(),
                        j.at("snr_range")[1].get<double>()};
  }
  if (j.contains("max_source_duration_s")) {
    config.max_source_duration_s = j.at("max_source_duration_s");
  }
  if (j.contains("speaker_counts")) {
    config.speaker_counts = j.at("speaker_counts").get<std::vector<int>>();
  }
  if (j.contains("sessions_per_count")) {
    config.sessions_per_count = j.at("sessions_per_count");
  }
  if (j.contains("seed")) config.seed = j.at("seed").get<uint64_t>();
  return config;
}

inline nlohmann::json planner_config_to_json(const PlannerConfig &config) {
  return nlohmann::json{
      {"snr_range", {config.snr_range[0], config.snr_range[1]}},
      {"max_source_duration_s", config.max_source_duration_s},
      {"speaker_counts", config.speaker_counts},
      {"sessions_per_count", config.sessions_per_count},
      {"seed", config.seed}};
}

// Thrown when the pool cannot supply enough speakers with unused
// utterances. Batch generation treats this as "stop here", not as a fault.
struct PoolExhaustedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One utterance on the session timeline. The gain is applied at render time;
// snr_db records the level of the reference speaker relative to this one.
struct PlacedUtterance {
  Utterance utterance;
  double start = 0.0;  // seconds
  double gain = 1.0;   // linear
  double snr_db = 0.0;

  double end() const { return start + utterance.duration; }
};

// Timeline of one simulated conversation. Placements are ordered by start
// time (ties keep insertion order), and two placements of the same speaker
// never overlap.
struct SessionPlan {
  std::string session_id;
  std::vector<PlacedUtterance> placements;
  int num_speakers = 0;
  uint64_t rng_seed = 0;

  // Speakers in order of first appearance on the timeline.
  std::vector<std::string> speakers_in_order() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const PlacedUtterance &p : placements) {
      if (seen.insert(p.utterance.speaker_id).second) {
        out.push_back(p.utterance.speaker_id);
      }
    }
    return out;
  }
};

// Places an already-ordered utterance sequence on a timeline. The first
// utterance starts at zero. Each later utterance starts at the previous
// placement's end plus a sampled gap: a same-speaker pause when the speaker
// repeats, otherwise either a negative overlap (with probability
// overlap_probability) or a cross-speaker pause. Starts are kept
// non-decreasing, non-negative, and never before the same speaker's previous
// end. Placement stops as soon as num_target_speakers distinct speakers have
// appeared, or when the sequence runs out.
inline SessionPlan place_sequence(const std::string &session_id,
                                  const std::vector<Utterance> &sequence,
                                  const DialogStats &stats,
                                  int num_target_speakers, Rng *rng) {
  if (num_target_speakers < 1 || num_target_speakers > 4) {
    throw std::invalid_argument("speaker count must be in [1, 4], got " +
                                std::to_string(num_target_speakers));
  }

  SessionPlan plan;
  plan.session_id = session_id;
  std::set<std::string> seen;
  std::map<std::string, double> last_end_of_speaker;

  for (const Utterance &utterance : sequence) {
    double start = 0.0;
    if (!plan.placements.empty()) {
      const PlacedUtterance &prev = plan.placements.back();
      double gap = 0.0;
      if (utterance.speaker_id == prev.utterance.speaker_id) {
        gap = stats.same_speaker_pause.sample(rng);
      } else if (rng->bernoulli(stats.overlap_probability)) {
        gap = -stats.overlap_duration.sample(rng);
      } else {
        gap = stats.different_speaker_pause.sample(rng);
      }
      start = prev.end() + gap;
      if (start < prev.start) start = prev.start;
      if (start < 0.0) start = 0.0;
      auto it = last_end_of_speaker.find(utterance.speaker_id);
      if (it != last_end_of_speaker.end() && start < it->second) {
        start = it->second;
      }
    }

    PlacedUtterance placed;
    placed.utterance = utterance;
    placed.start = start;
    last_end_of_speaker[utterance.speaker_id] = placed.end();
    seen.insert(utterance.speaker_id);
    plan.placements.push_back(std::move(placed));
    if (static_cast<int>(seen.size()) == num_target_speakers) break;
  }

  plan.num_speakers = static_cast<int>(seen.size());
  return plan;
}

// Plans one session of k speakers from the pool. Speakers are drawn
// uniformly without replacement among those that still have unused
// utterances. The turn order comes from a global shuffle of one slot per
// unused utterance; each slot consumes its speaker's next unused utterance
// in stored order. Placed utterances are marked used in the pool.
inline SessionPlan plan_session(UtterancePool *pool, const DialogStats &stats,
                                int k, Rng *rng, const PlannerConfig &config,
                                const std::string &session_id = "session") {
  if (k < 1 || k > 4) {
    throw std::invalid_argument("speaker count must be in [1, 4], got " +
                                std::to_string(k));
  }
  (void)config;  // placement itself has no tunables beyond the stats

  std::vector<std::string> speakers = pool->speakers_with_unused();
  if (static_cast<int>(speakers.size()) < k) {
    throw PoolExhaustedError(
        "insufficient pool: need " + std::to_string(k) +
        " speakers with unused utterances, have " +
        std::to_string(speakers.size()));
  }
  for (int i = 0; i < k; ++i) {
    const size_t j =
        static_cast<size_t>(i) + rng->uniform_index(speakers.size() - i);
    std::swap(speakers[i], speakers[j]);
  }
  speakers.resize(k);

  std::map<std::string, std::vector<Utterance>> queues;
  std::vector<std::string> slots;
  for (const std::string &speaker : speakers) {
    queues[speaker] = pool->unused_of(speaker);
    for (size_t i = 0; i < queues[speaker].size(); ++i) {
      slots.push_back(speaker);
    }
  }
  rng->shuffle(&slots);

  std::map<std::string, size_t> next_index;
  std::vector<Utterance> sequence;
  sequence.reserve(slots.size());
  for (const std::string &speaker : slots) {
    sequence.push_back(queues[speaker][next_index[speaker]++]);
  }

  SessionPlan plan = place_sequence(session_id, sequence, stats, k, rng);
  for (const PlacedUtterance &p : plan.placements) {
    pool->mark_used(p.utterance.utterance_id);
  }
  return plan;
}

// Assigns one SNR value per speaker and the matching linear gain. The first
// speaker to appear is the 0 dB reference and keeps gain 1; every other
// speaker draws snr uniformly from snr_range and is scaled so that the
// reference sits exactly snr_db above it. Speaker powers are measured over
// the raw, unpadded source samples. The loader maps an Utterance to its mono
// samples.
template <typename AudioLoader>
SessionPlan assign_snrs(SessionPlan plan, Rng *rng,
                        std::array<double, 2> snr_range, AudioLoader &&loader) {
  if (plan.placements.empty()) {
    throw std::invalid_argument("assign_snrs: plan has no placements");
  }
  if (snr_range[0] > snr_range[1]) {
    throw std::invalid_argument("assign_snrs: snr range is inverted");
  }

  const std::vector<std::string> speakers = plan.speakers_in_order();
  std::map<std::string, double> power_sum;
  std::map<std::string, size_t> sample_count;
  for (const PlacedUtterance &p : plan.placements) {
    const std::vector<double> samples = loader(p.utterance);
    double sum = 0.0;
    for (double x : samples) sum += x * x;
    power_sum[p.utterance.speaker_id] += sum;
    sample_count[p.utterance.speaker_id] += samples.size();
  }

  std::map<std::string, double> power;
  for (const std::string &speaker : speakers) {
    const size_t n = sample_count[speaker];
    const double p = n == 0 ? 0.0 : power_sum[speaker] / static_cast<double>(n);
    if (!(p > 0.0)) {
      throw std::runtime_error("silent source: speaker " + speaker +
                               " has zero power");
    }
    power[speaker] = p;
  }

  std::map<std::string, double> snr_of;
  std::map<std::string, double> gain_of;
  const std::string &reference = speakers.front();
  snr_of[reference] = 0.0;
  gain_of[reference] = 1.0;
  for (size_t i = 1; i < speakers.size(); ++i) {
    const std::string &speaker = speakers[i];
    const double snr = rng->uniform(snr_range[0], snr_range[1]);
    snr_of[speaker] = snr;
    gain_of[speaker] = compute_gain(power[speaker], power[reference], snr);
  }

  for (PlacedUtterance &p : plan.placements) {
    p.snr_db = snr_of[p.utterance.speaker_id];
    p.gain = gain_of[p.utterance.speaker_id];
  }
  return plan;
}

}  // namespace mixsim

#endif  // MIXSIM_PLANNER_HPP_
