// include/mixsim/pool.hpp

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

#ifndef MIXSIM_POOL_HPP_
#define MIXSIM_POOL_HPP_

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace mixsim {

// One single-speaker source segment: audio reference plus transcript.
// Transcripts keep their original casing and punctuation.
struct Utterance {
  std::string utterance_id;
  std::string speaker_id;
  double duration = 0.0;  // seconds
  std::string transcript;
  std::string audio_path;
  int sample_rate = 0;  // 0 until known from the audio file
};

// Source material for session planning. Every utterance can be placed at
// most once across all sessions planned from the same pool.
class UtterancePool {
 public:
  void add(Utterance utterance) {
    if (utterance.utterance_id.empty()) {
      throw std::invalid_argument("utterance id must not be empty");
    }
    if (utterance.speaker_id.empty()) {
      throw std::invalid_argument("speaker id must not be empty (utterance " +
                                  utterance.utterance_id + ")");
    }
    if (!(utterance.duration > 0.0)) {
      throw std::invalid_argument("utterance duration must be positive: " +
                                  utterance.utterance_id);
    }
    if (!ids_.insert(utterance.utterance_id).second) {
      throw std::invalid_argument("duplicate utterance id: " +
                                  utterance.utterance_id);
    }
    by_speaker_[utterance.speaker_id].push_back(std::move(utterance));
  }

  size_t size() const { return ids_.size(); }
  size_t used_count() const { return used_.size(); }

  bool is_used(const std::string &utterance_id) const {
    return used_.count(utterance_id) > 0;
  }

  void mark_used(const std::string &utterance_id) {
    if (!ids_.count(utterance_id)) {
      throw std::invalid_argument("unknown utterance id: " + utterance_id);
    }
    if (!used_.insert(utterance_id).second) {
      throw std::logic_error("utterance already used: " + utterance_id);
    }
  }

  // Speakers that still have at least one unused utterance, sorted by id.
  std::vector<std::string> speakers_with_unused() const {
    std::vector<std::string> out;
    for (const auto &[speaker, utterances] : by_speaker_) {
      for (const Utterance &u : utterances) {
        if (!used_.count(u.utterance_id)) {
          out.push_back(speaker);
          break;
        }
      }
    }
    return out;
  }

  // Unused utterances of one speaker, in the order they were added.
  std::vector<Utterance> unused_of(const std::string &speaker_id) const {
    std::vector<Utterance> out;
    auto it = by_speaker_.find(speaker_id);
    if (it == by_speaker_.end()) return out;
    for (const Utterance &u : it->second) {
      if (!used_.count(u.utterance_id)) out.push_back(u);
    }
    return out;
  }

 private:
  std::map<std::string, std::vector<Utterance>> by_speaker_;
  std::set<std::string> ids_;
  std::set<std::string> used_;
};

struct PoolLoadResult {
  UtterancePool pool;
  int rejected_too_long = 0;
};

// Loads a pool manifest: one JSON object per line with keys
// id/speaker/path/duration/transcript (sample_rate optional). Audio paths
// resolve relative to the manifest file. Utterances longer than
// max_source_duration_s are rejected at ingestion and counted.
inline PoolLoadResult load_pool_manifest(const std::string &path,
                                         double max_source_duration_s = 15.0) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pool manifest: " + path);
  const std::filesystem::path base =
      std::filesystem::path(path).parent_path();

  PoolLoadResult result;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception &e) {
      throw std::runtime_error("pool manifest " + path + " line " +
                               std::to_string(line_number) +
                               ": malformed JSON: " + e.what());
    }
    for (const char *key : {"id", "speaker", "path", "duration"}) {
      if (!j.contains(key)) {
        throw std::runtime_error("pool manifest " + path + " line " +
                                 std::to_string(line_number) +
                                 ": missing key '" + key + "'");
      }
    }
    Utterance u;
    u.utterance_id = j.at("id").get<std::string>();
    u.speaker_id = j.at("speaker").get<std::string>();
    u.duration = j.at("duration").get<double>();
    u.transcript = j.value("transcript", std::string());
    u.sample_rate = j.value("sample_rate", 0);
    const std::filesystem::path audio(j.at("path").get<std::string>());
    u.audio_path =
        audio.is_absolute() ? audio.string() : (base / audio).string();
    if (u.duration > max_source_duration_s) {
      ++result.rejected_too_long;
      continue;
    }
    result.pool.add(std::move(u));
  }
  return result;
}

}  // namespace mixsim

#endif  // MIXSIM_POOL_HPP_
