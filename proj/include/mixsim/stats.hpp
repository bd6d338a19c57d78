// include/mixsim/stats.hpp

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

#ifndef MIXSIM_STATS_HPP_
#define MIXSIM_STATS_HPP_

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mixsim/rng.hpp"
#include "mixsim/rttm.hpp"

namespace mixsim {

// A bag of observed durations. Sampling draws a stored value uniformly at
// random; no parametric model is fitted, so every emitted value is one of
// the observations.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;

  explicit EmpiricalDistribution(std::vector<double> samples)
      : samples_(std::move(samples)) {
    for (double s : samples_) {
      if (!(s >= 0.0)) {
        throw std::invalid_argument(
            "empirical distribution samples must be non-negative");
      }
    }
    std::sort(samples_.begin(), samples_.end());
  }

  const std::vector<double> &samples() const { return samples_; }
  size_t count() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  double sample(Rng *rng) const {
    if (samples_.empty()) {
      throw std::runtime_error("cannot sample from an empty distribution");
    }
    return samples_[rng->uniform_index(samples_.size())];
  }

 private:
  std::vector<double> samples_;  // sorted
};

// Turn-taking statistics of a conversation corpus: pause lengths between
// turns of the same speaker, pause lengths across a speaker change, overlap
// lengths at a speaker change, and the probability that a speaker change
// overlaps at all.
struct DialogStats {
  EmpiricalDistribution same_speaker_pause;
  EmpiricalDistribution different_speaker_pause;
  EmpiricalDistribution overlap_duration;
  double overlap_probability = 0.0;
};

// Derives DialogStats from a segmentation. Segments are grouped by recording
// and ordered by onset; every adjacent pair inside one recording contributes
// either a pause or an overlap. Gaps never cross recording boundaries.
// Negative gaps between two segments of the same speaker are annotation
// noise and are dropped.
inline DialogStats derive_dialog_stats(const std::vector<Segment> &segments) {
  std::map<std::string, std::vector<Segment>> by_recording;
  for (const Segment &segment : segments) {
    by_recording[segment.recording_id].push_back(segment);
  }

  std::vector<double> same_pauses;
  std::vector<double> different_pauses;
  std::vector<double> overlaps;
  size_t different_speaker_pairs = 0;
  size_t overlapped_pairs = 0;
  bool any_adjacent_pair = false;

  for (auto &[recording_id, group] : by_recording) {
    // Total order so the derived statistics do not depend on input order.
    std::sort(group.begin(), group.end(),
              [](const Segment &a, const Segment &b) {
                if (a.onset != b.onset) return a.onset < b.onset;
                if (a.speaker_id != b.speaker_id)
                  return a.speaker_id < b.speaker_id;
                return a.duration < b.duration;
              });
    for (size_t i = 1; i < group.size(); ++i) {
      const Segment &prev = group[i - 1];
      const Segment &next = group[i];
      any_adjacent_pair = true;
      const double gap = next.onset - prev.offset();
      if (prev.speaker_id == next.speaker_id) {
        if (gap >= 0.0) same_pauses.push_back(gap);
      } else {
        ++different_speaker_pairs;
        if (gap >= 0.0) {
          different_pauses.push_back(gap);
        } else {
          overlaps.push_back(-gap);
          ++overlapped_pairs;
        }
      }
    }
  }

  if (!any_adjacent_pair) {
    throw std::runtime_error(
        "insufficient statistics: no recording contains two or more segments");
  }
  if (different_speaker_pairs == 0) {
    throw std::runtime_error(
        "insufficient statistics: no adjacent pairs with different speakers; "
        "overlap probability is undefined");
  }

  DialogStats stats;
  stats.same_speaker_pause = EmpiricalDistribution(std::move(same_pauses));
  stats.different_speaker_pause =
      EmpiricalDistribution(std::move(different_pauses));
  stats.overlap_duration = EmpiricalDistribution(std::move(overlaps));
  stats.overlap_probability = static_cast<double>(overlapped_pairs) /
                              static_cast<double>(different_speaker_pairs);
  return stats;
}

inline nlohmann::json dialog_stats_to_json(const DialogStats &stats) {
  return nlohmann::json{
      {"same_spk_pause", stats.same_speaker_pause.samples()},
      {"diff_spk_pause", stats.different_speaker_pause.samples()},
      {"overlap_dur", stats.overlap_duration.samples()},
      {"p_overlap", stats.overlap_probability}};
}

inline DialogStats dialog_stats_from_json(const nlohmann::json &j) {
  for (const char *key :
       {"same_spk_pause", "diff_spk_pause", "overlap_dur", "p_overlap"}) {
    if (!j.contains(key)) {
      throw std::runtime_error(std::string("dialog stats: missing key '") +
                               key + "'");
    }
  }
  DialogStats stats;
  stats.same_speaker_pause =
      EmpiricalDistribution(j.at("same_spk_pause").get<std::vector<double>>());
  stats.different_speaker_pause =
      EmpiricalDistribution(j.at("diff_spk_pause").get<std::vector<double>>());
  stats.overlap_duration =
      EmpiricalDistribution(j.at("overlap_dur").get<std::vector<double>>());
  stats.overlap_probability = j.at("p_overlap").get<double>();
  if (stats.overlap_probability < 0.0 || stats.overlap_probability > 1.0) {
    throw std::runtime_error("dialog stats: p_overlap must be in [0, 1]");
  }
  return stats;
}

inline void save_dialog_stats(const DialogStats &stats,
                              const std::string &path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write stats file: " + path);
  out << dialog_stats_to_json(stats).dump(2) << "\n";
}

inline DialogStats load_dialog_stats(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stats file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw std::runtime_error("malformed stats file " + path + ": " + e.what());
  }
  return dialog_stats_from_json(j);
}

}  // namespace mixsim

#endif  // MIXSIM_STATS_HPP_
