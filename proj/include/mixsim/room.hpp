// include/mixsim/room.hpp

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

#ifndef MIXSIM_ROOM_HPP_
#define MIXSIM_ROOM_HPP_

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixsim/rng.hpp"

namespace mixsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double distance(const Vec3 &a, const Vec3 &b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Sampling ranges for the acoustic environment. Defaults describe plausible
// meeting rooms.
struct RoomStats {
  // [lo, hi] metres per axis.
  std::array<std::array<double, 2>, 3> dim_ranges{
      {{3.0, 10.0}, {3.0, 10.0}, {2.5, 4.0}}};
  std::array<double, 2> t60_range{0.2, 0.8};
};

inline constexpr double kWallMargin = 0.1;                 // metres
inline constexpr double kMinSourceListenerDistance = 0.2;  // metres

inline void validate_room_stats(const RoomStats &stats) {
  for (const auto &range : stats.dim_ranges) {
    if (!(range[0] > 0.0) || range[0] > range[1]) {
      throw std::invalid_argument("room dimension range must satisfy 0 < lo <= hi");
    }
  }
  if (stats.t60_range[0] < 0.1 || stats.t60_range[0] > stats.t60_range[1]) {
    throw std::invalid_argument("t60 range must satisfy 0.1 <= lo <= hi");
  }
}

// One realized acoustic environment. A session has exactly one room,
// listener and t60; only source positions vary between speakers.
struct RoomSpec {
  Vec3 dims;
  Vec3 listener;
  double t60 = 0.0;  // seconds
  std::map<std::string, Vec3> sources;
};

// Samples a room, a listener position, a reverberation time, and one source
// position per speaker, all inside the same room with a wall margin. Source
// positions are redrawn (at most 100 times) until they keep a minimum
// distance from the listener.
inline RoomSpec sample_room(const RoomStats &stats,
                            const std::vector<std::string> &speakers,
                            Rng *rng) {
  validate_room_stats(stats);
  if (speakers.empty()) {
    throw std::invalid_argument("sample_room: need at least one speaker");
  }
  {
    std::set<std::string> unique(speakers.begin(), speakers.end());
    if (unique.size() != speakers.size()) {
      throw std::invalid_argument("sample_room: duplicate speaker ids");
    }
  }

  RoomSpec room;
  room.dims.x = rng->uniform(stats.dim_ranges[0][0], stats.dim_ranges[0][1]);
  room.dims.y = rng->uniform(stats.dim_ranges[1][0], stats.dim_ranges[1][1]);
  room.dims.z = rng->uniform(stats.dim_ranges[2][0], stats.dim_ranges[2][1]);
  for (double dim : {room.dims.x, room.dims.y, room.dims.z}) {
    if (dim < 2.0 * kWallMargin) {
      throw std::runtime_error("room too small for wall margins");
    }
  }

  auto sample_position = [&]() {
    Vec3 p;
    p.x = rng->uniform(kWallMargin, room.dims.x - kWallMargin);
    p.y = rng->uniform(kWallMargin, room.dims.y - kWallMargin);
    p.z = rng->uniform(kWallMargin, room.dims.z - kWallMargin);
    return p;
  };

  room.listener = sample_position();
  room.t60 = rng->uniform(stats.t60_range[0], stats.t60_range[1]);

  for (const std::string &speaker : speakers) {
    bool placed = false;
    for (int attempt = 0; attempt < 100; ++attempt) {
      const Vec3 candidate = sample_position();
      if (distance(candidate, room.listener) >=
          kMinSourceListenerDistance) {
        room.sources[speaker] = candidate;
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw std::runtime_error("failed to place source for speaker " +
                               speaker + " after 100 attempts");
    }
  }
  return room;
}

inline nlohmann::json room_to_json(const RoomSpec &room) {
  nlohmann::json sources = nlohmann::json::object();
  for (const auto &[speaker, p] : room.sources) {
    sources[speaker] = {p.x, p.y, p.z};
  }
  return nlohmann::json{
      {"dims", {room.dims.x, room.dims.y, room.dims.z}},
      {"listener", {room.listener.x, room.listener.y, room.listener.z}},
      {"t60", room.t60},
      {"sources", sources}};
}

inline RoomSpec room_from_json(const nlohmann::json &j) {
  auto vec3 = [](const nlohmann::json &a) {
    if (!a.is_array() || a.size() != 3) {
      throw std::runtime_error("room: expected a 3-element array");
    }
    return Vec3{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
  };
  RoomSpec room;
  room.dims = vec3(j.at("dims"));
  room.listener = vec3(j.at("listener"));
  room.t60 = j.at("t60").get<double>();
  for (const auto &[speaker, p] : j.at("sources").items()) {
    room.sources[speaker] = vec3(p);
  }
  return room;
}

}  // namespace mixsim

#endif  // MIXSIM_ROOM_HPP_
