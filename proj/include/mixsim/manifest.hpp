// include/mixsim/manifest.hpp

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

#ifndef MIXSIM_MANIFEST_HPP_
#define MIXSIM_MANIFEST_HPP_

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mixsim/mixer.hpp"
#include "mixsim/planner.hpp"
#include "mixsim/room.hpp"
#include "mixsim/rttm.hpp"

namespace mixsim {

struct UtteranceEntry {
  std::string utterance_id;
  double start = 0.0;     // seconds
  double duration = 0.0;  // seconds
  std::string transcript;
  double snr_db = 0.0;
};

struct SourceEntry {
  std::string speaker_id;
  std::string path;  // relative to the manifest file
  std::vector<UtteranceEntry> utterances;  // sorted by start
};

// Ground truth for one rendered mixture.
struct SessionManifest {
  std::string session_id;
  std::string condition;
  std::string version;
  int sample_rate = 0;
  std::string mixture_path;  // relative to the manifest file
  std::vector<SourceEntry> sources;
  std::optional<RoomSpec> room;
  uint64_t seed = 0;
};

// Serialized reference transcript of a session: utterance transcripts joined
// in start order (first in, first out), with sc_token inserted wherever the
// speaker changes between consecutive utterances. Same-speaker adjacency
// gets no token; there is no leading token.
inline std::string serialize_sot(const SessionPlan &plan,
                                 const std::string &sc_token = "<sc>") {
  std::string out;
  auto append = [&out](const std::string &piece) {
    if (piece.empty()) return;
    if (!out.empty()) out += ' ';
    out += piece;
  };
  const std::string *previous_speaker = nullptr;
  for (const PlacedUtterance &p : plan.placements) {
    if (previous_speaker != nullptr &&
        *previous_speaker != p.utterance.speaker_id) {
      append(sc_token);
    }
    append(p.utterance.transcript);
    previous_speaker = &p.utterance.speaker_id;
  }
  return out;
}

inline SessionManifest make_manifest(
    const MixtureBundle &bundle, const std::string &mixture_path,
    const std::map<std::string, std::string> &source_paths, uint64_t seed) {
  SessionManifest manifest;
  manifest.session_id = bundle.plan.session_id;
  manifest.condition = to_string(bundle.condition);
  manifest.version = to_string(bundle.version);
  manifest.sample_rate = bundle.sample_rate;
  manifest.mixture_path = mixture_path;
  manifest.room = bundle.room;
  manifest.seed = seed;
  for (const auto &[speaker, track] : bundle.targets) {
    SourceEntry source;
    source.speaker_id = speaker;
    auto it = source_paths.find(speaker);
    source.path = it == source_paths.end() ? std::string() : it->second;
    for (const PlacedUtterance &p : bundle.plan.placements) {
      if (p.utterance.speaker_id != speaker) continue;
      UtteranceEntry entry;
      entry.utterance_id = p.utterance.utterance_id;
      entry.start = p.start;
      entry.duration = p.utterance.duration;
      entry.transcript = p.utterance.transcript;
      entry.snr_db = p.snr_db;
      source.utterances.push_back(std::move(entry));
    }
    manifest.sources.push_back(std::move(source));
  }
  return manifest;
}

inline nlohmann::json manifest_to_json(const SessionManifest &manifest) {
  nlohmann::json sources = nlohmann::json::array();
  for (const SourceEntry &source : manifest.sources) {
    nlohmann::json utterances = nlohmann::json::array();
    for (const UtteranceEntry &u : source.utterances) {
      utterances.push_back({{"utterance_id", u.utterance_id},
                            {"start", u.start},
                            {"duration", u.duration},
                            {"transcript", u.transcript},
                            {"snr_db", u.snr_db}});
    }
    sources.push_back({{"speaker_id", source.speaker_id},
                       {"path", source.path},
                       {"utterances", utterances}});
  }
  nlohmann::json j{{"session_id", manifest.session_id},
                   {"condition", manifest.condition},
                   {"version", manifest.version},
                   {"sample_rate", manifest.sample_rate},
                   {"mixture_path", manifest.mixture_path},
                   {"sources", sources},
                   {"seed", manifest.seed}};
  if (manifest.room) j["room"] = room_to_json(*manifest.room);
  return j;
}

inline SessionManifest manifest_from_json(const nlohmann::json &j) {
  for (const char *key : {"session_id", "condition", "version", "sample_rate",
                          "mixture_path", "sources", "seed"}) {
    if (!j.contains(key)) {
      throw std::runtime_error(std::string("manifest: missing key '") + key +
                               "'");
    }
  }
  SessionManifest manifest;
  manifest.session_id = j.at("session_id").get<std::string>();
  manifest.condition = j.at("condition").get<std::string>();
  manifest.version = j.at("version").get<std::string>();
  manifest.sample_rate = j.at("sample_rate").get<int>();
  manifest.mixture_path = j.at("mixture_path").get<std::string>();
  manifest.seed = j.at("seed").get<uint64_t>();
  if (j.contains("room")) manifest.room = room_from_json(j.at("room"));
  for (const auto &s : j.at("sources")) {
    SourceEntry source;
    source.speaker_id = s.at("speaker_id").get<std::string>();
    source.path = s.at("path").get<std::string>();
    for (const auto &u : s.at("utterances")) {
      UtteranceEntry entry;
      entry.utterance_id = u.at("utterance_id").get<std::string>();
      entry.start = u.at("start").get<double>();
      entry.duration = u.at("duration").get<double>();
      entry.transcript = u.at("transcript").get<std::string>();
      entry.snr_db = u.at("snr_db").get<double>();
      source.utterances.push_back(std::move(entry));
    }
    manifest.sources.push_back(std::move(source));
  }
  return manifest;
}

// One JSON object per line.
inline void write_manifest(const std::vector<SessionManifest> &manifests,
                           const std::string &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  for (const SessionManifest &m : manifests) {
    out << manifest_to_json(m).dump() << "\n";
  }
  if (!out) throw std::runtime_error("short write to manifest: " + path);
}

inline std::vector<SessionManifest> read_manifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  std::vector<SessionManifest> manifests;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      manifests.push_back(manifest_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception &e) {
      throw std::runtime_error("manifest " + path + " line " +
                               std::to_string(line_number) + ": " + e.what());
    }
  }
  return manifests;
}

// Segmentation ground truth as SPEAKER records, one per utterance, in start
// order, with the session id as the recording id.
inline std::string export_rttm(const SessionManifest &manifest) {
  std::vector<std::pair<double, std::string>> lines;
  for (const SourceEntry &source : manifest.sources) {
    for (const UtteranceEntry &u : source.utterances) {
      lines.emplace_back(
          u.start, format_rttm_line(manifest.session_id, source.speaker_id,
                                    u.start, u.duration));
    }
  }
  std::stable_sort(lines.begin(), lines.end(),
                   [](const auto &a, const auto &b) { return a.first < b.first; });
  std::string out;
  for (const auto &[start, line] : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace mixsim

#endif  // MIXSIM_MANIFEST_HPP_
