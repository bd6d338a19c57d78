// include/mixsim/mixer.hpp

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

#ifndef MIXSIM_MIXER_HPP_
#define MIXSIM_MIXER_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixsim/gain.hpp"
#include "mixsim/planner.hpp"
#include "mixsim/rir.hpp"
#include "mixsim/room.hpp"

namespace mixsim {

// max: pad every speaker track to the longest extent. min: truncate all
// tracks at the earliest per-speaker track end, i.e. the instant the first
// speaker's contribution is fully over.
enum class MixVersion { kMax, kMin };
enum class MixCondition { kAnechoic, kReverberant };

inline std::string to_string(MixVersion v) {
  return v == MixVersion::kMax ? "max" : "min";
}
inline std::string to_string(MixCondition c) {
  return c == MixCondition::kAnechoic ? "anechoic" : "reverberant";
}

inline MixVersion mix_version_from_string(const std::string &s) {
  if (s == "max") return MixVersion::kMax;
  if (s == "min") return MixVersion::kMin;
  throw std::invalid_argument("unknown version '" + s + "' (want max|min)");
}
inline MixCondition mix_condition_from_string(const std::string &s) {
  if (s == "anechoic") return MixCondition::kAnechoic;
  if (s == "reverberant") return MixCondition::kReverberant;
  throw std::invalid_argument("unknown condition '" + s +
                              "' (want anechoic|reverberant)");
}

// A rendered session: the mixture plus one target track per speaker, all the
// same length, with the mixture equal to the sum of the targets in double
// precision.
struct MixtureBundle {
  std::vector<double> mixture;
  // Speaker order is first appearance on the timeline.
  std::vector<std::pair<std::string, std::vector<double>>> targets;
  MixVersion version = MixVersion::kMax;
  MixCondition condition = MixCondition::kAnechoic;
  SessionPlan plan;
  std::optional<RoomSpec> room;
  int sample_rate = 0;
};

namespace detail {

// Loader: Utterance -> mono samples at fs. RIR provider (may be null):
// speaker id -> impulse response shared by all of that speaker's utterances.
template <typename AudioLoader>
MixtureBundle render_impl(
    const SessionPlan &plan, AudioLoader &&loader, int fs, MixVersion version,
    MixCondition condition, const RoomSpec *room,
    const std::function<ImpulseResponse(const std::string &)> *rir_provider) {
  if (plan.placements.empty()) {
    throw std::invalid_argument("render: plan has no placements");
  }
  if (fs <= 0) throw std::invalid_argument("render: bad sample rate");

  // Same-speaker placements must not overlap on the dry timeline. The small
  // slack absorbs rounding in stored durations.
  std::map<std::string, const PlacedUtterance *> previous_of;
  for (const PlacedUtterance &p : plan.placements) {
    auto it = previous_of.find(p.utterance.speaker_id);
    if (it != previous_of.end() && p.start < it->second->end() - 1e-9) {
      throw std::runtime_error("overlapping placements for speaker " +
                               p.utterance.speaker_id + " in session " +
                               plan.session_id);
    }
    previous_of[p.utterance.speaker_id] = &p;
  }

  std::map<std::string, ImpulseResponse> rirs;
  if (rir_provider != nullptr) {
    for (const std::string &speaker : plan.speakers_in_order()) {
      ImpulseResponse rir = (*rir_provider)(speaker);
      if (rir.sample_rate != fs) {
        throw std::runtime_error("rir sample rate mismatch for speaker " +
                                 speaker);
      }
      if (rir.samples.empty()) {
        throw std::runtime_error("empty rir for speaker " + speaker);
      }
      rirs[speaker] = std::move(rir);
    }
  }

  struct Contribution {
    size_t offset = 0;
    std::vector<double> samples;
  };
  std::map<std::string, std::vector<Contribution>> tracks_raw;
  std::map<std::string, size_t> extent;

  for (const PlacedUtterance &p : plan.placements) {
    std::vector<double> samples = loader(p.utterance);
    if (samples.empty()) {
      throw std::runtime_error("empty audio for utterance " +
                               p.utterance.utterance_id);
    }
    const long long expected = std::llround(p.utterance.duration * fs);
    if (std::llabs(static_cast<long long>(samples.size()) - expected) > 1) {
      throw std::runtime_error(
          "audio length mismatch for utterance " + p.utterance.utterance_id +
          ": manifest says " + std::to_string(expected) + " samples, file has " +
          std::to_string(samples.size()));
    }
    if (rir_provider != nullptr) {
      samples = convolve(samples, rirs.at(p.utterance.speaker_id), fs);
    }
    for (double &x : samples) x *= p.gain;

    Contribution c;
    c.offset = static_cast<size_t>(std::llround(p.start * fs));
    c.samples = std::move(samples);
    const size_t end = c.offset + c.samples.size();
    auto &e = extent[p.utterance.speaker_id];
    if (end > e) e = end;
    tracks_raw[p.utterance.speaker_id].push_back(std::move(c));
  }

  size_t length = 0;
  if (version == MixVersion::kMax) {
    for (const auto &[speaker, e] : extent) length = std::max(length, e);
  } else {
    length = SIZE_MAX;
    for (const auto &[speaker, e] : extent) length = std::min(length, e);
  }

  MixtureBundle bundle;
  bundle.version = version;
  bundle.condition = condition;
  bundle.plan = plan;
  bundle.sample_rate = fs;
  if (room != nullptr) bundle.room = *room;

  for (const std::string &speaker : plan.speakers_in_order()) {
    std::vector<double> track(length, 0.0);
    for (const Contribution &c : tracks_raw[speaker]) {
      if (c.offset >= length) continue;
      const size_t n = std::min(c.samples.size(), length - c.offset);
      for (size_t i = 0; i < n; ++i) track[c.offset + i] += c.samples[i];
    }
    bundle.targets.emplace_back(speaker, std::move(track));
  }

  bundle.mixture.assign(length, 0.0);
  for (const auto &[speaker, track] : bundle.targets) {
    for (size_t i = 0; i < length; ++i) bundle.mixture[i] += track[i];
  }
  return bundle;
}

}  // namespace detail

// Renders the dry (anechoic) mixture: each placement's samples are scaled by
// its speaker gain and added at its start offset.
template <typename AudioLoader>
MixtureBundle render_session(const SessionPlan &plan, AudioLoader &&loader,
                             int fs, MixVersion version) {
  return detail::render_impl(plan, std::forward<AudioLoader>(loader), fs,
                             version, MixCondition::kAnechoic, nullptr,
                             nullptr);
}

// Renders the reverberant mixture: each source is convolved with its
// speaker's impulse response before gain and placement; offsets are the same
// as in the anechoic render. Targets are the reverberant per-speaker tracks.
template <typename AudioLoader>
MixtureBundle render_reverberant(
    const SessionPlan &plan, const RoomSpec &room,
    const std::function<ImpulseResponse(const std::string &)> &rir_provider,
    AudioLoader &&loader, int fs, MixVersion version) {
  for (const std::string &speaker : plan.speakers_in_order()) {
    if (!room.sources.count(speaker)) {
      throw std::runtime_error("room has no source position for speaker " +
                               speaker);
    }
  }
  return detail::render_impl(plan, std::forward<AudioLoader>(loader), fs,
                             version, MixCondition::kReverberant, &room,
                             &rir_provider);
}

}  // namespace mixsim

#endif  // MIXSIM_MIXER_HPP_
