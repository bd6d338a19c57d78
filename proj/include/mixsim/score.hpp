// include/mixsim/score.hpp

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

#ifndef MIXSIM_SCORE_HPP_
#define MIXSIM_SCORE_HPP_

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mixsim/der.hpp"
#include "mixsim/manifest.hpp"
#include "mixsim/metrics.hpp"
#include "mixsim/wav.hpp"
#include "mixsim/wer.hpp"

namespace mixsim {

struct ScoreOptions {
  double collar = 0.0;
  bool score_overlap = true;
  bool skip_missing = false;
  TextNormalization normalization{};
  std::string sc_token = "<sc>";
  std::optional<std::string> version_filter;
  std::optional<std::string> condition_filter;
};

namespace detail {

inline std::vector<SessionManifest> select_sessions(
    const std::string &manifest_path, const ScoreOptions &options,
    bool require_unique) {
  const std::vector<SessionManifest> all = read_manifest(manifest_path);
  std::vector<SessionManifest> selected;
  std::set<std::string> seen;
  for (const SessionManifest &m : all) {
    if (options.version_filter && m.version != *options.version_filter) {
      continue;
    }
    if (options.condition_filter &&
        m.condition != *options.condition_filter) {
      continue;
    }
    if (!seen.insert(m.session_id).second) {
      if (require_unique) {
        throw std::runtime_error(
            "multiple manifest entries for session " + m.session_id +
            "; narrow the selection with a version/condition filter");
      }
      // Ground truth (transcripts, timing, speakers) is shared by all
      // renderings of a session, so duplicates are collapsed.
      continue;
    }
    selected.push_back(m);
  }
  if (selected.empty()) {
    throw std::runtime_error("no sessions selected from " + manifest_path);
  }
  return selected;
}

// Splits text on every occurrence of token, trimming surrounding spaces.
inline std::vector<std::string> split_on_token(const std::string &text,
                                               const std::string &token) {
  std::vector<std::string> pieces;
  size_t pos = 0;
  while (true) {
    const size_t hit = text.find(token, pos);
    const std::string piece =
        hit == std::string::npos ? text.substr(pos)
                                 : text.substr(pos, hit - pos);
    const size_t first = piece.find_first_not_of(" \t");
    const size_t last = piece.find_last_not_of(" \t");
    pieces.push_back(first == std::string::npos
                         ? std::string()
                         : piece.substr(first, last - first + 1));
    if (hit == std::string::npos) break;
    pos = hit + token.size();
  }
  return pieces;
}

struct HypothesisTranscript {
  std::vector<std::string> streams;
  int num_speakers = 0;
};

// Hypothesis transcripts: either JSONL objects
// {"session_id", "streams": [...], "num_speakers"?} or tab-separated
// serialized lines "session_id<TAB>text", where the text is cut into streams
// at each sc_token. Without an explicit count, the speaker-count estimate is
// the stream count (exact only when every speaker takes a single turn).
inline std::map<std::string, HypothesisTranscript> read_hypothesis_transcripts(
    const std::string &path, const std::string &sc_token) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open hypothesis file: " + path);
  std::map<std::string, HypothesisTranscript> out;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    std::string session_id;
    HypothesisTranscript hyp;
    if (line[start] == '{') {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception &e) {
        throw std::runtime_error("hypothesis " + path + " line " +
                                 std::to_string(line_number) +
                                 ": malformed JSON: " + e.what());
      }
      session_id = j.at("session_id").get<std::string>();
      hyp.streams = j.at("streams").get<std::vector<std::string>>();
      hyp.num_speakers =
          j.value("num_speakers", static_cast<int>(hyp.streams.size()));
    } else {
      const size_t tab = line.find('\t');
      if (tab == std::string::npos) {
        throw std::runtime_error("hypothesis " + path + " line " +
                                 std::to_string(line_number) +
                                 ": expected 'session_id<TAB>text'");
      }
      session_id = line.substr(0, tab);
      hyp.streams = split_on_token(line.substr(tab + 1), sc_token);
      hyp.num_speakers = static_cast<int>(hyp.streams.size());
    }
    if (!out.emplace(session_id, std::move(hyp)).second) {
      throw std::runtime_error("hypothesis " + path +
                               ": duplicate session id " + session_id);
    }
  }
  return out;
}

inline std::vector<std::string> reference_streams(const SessionManifest &m) {
  std::vector<std::string> streams;
  for (const SourceEntry &source : m.sources) {
    std::string stream;
    for (const UtteranceEntry &u : source.utterances) {
      if (!stream.empty() && !u.transcript.empty()) stream += ' ';
      stream += u.transcript;
    }
    streams.push_back(std::move(stream));
  }
  return streams;
}

inline std::vector<Segment> reference_segments(const SessionManifest &m) {
  std::vector<Segment> segments;
  for (const SourceEntry &source : m.sources) {
    for (const UtteranceEntry &u : source.utterances) {
      Segment s;
      s.recording_id = m.session_id;
      s.speaker_id = source.speaker_id;
      s.onset = u.start;
      s.duration = u.duration;
      segments.push_back(std::move(s));
    }
  }
  return segments;
}

}  // namespace detail

// Scores separation estimates against rendered targets. The hypothesis
// directory holds {session_id}/est_{i}.wav; each session contributes its
// best-permutation mean si_snr and the improvement over scoring the mixture
// itself. A session with missing estimates is scored as a no-op separator
// (the mixture presented for every source) unless skip_missing is set.
inline nlohmann::json score_separation(const std::string &ref_manifest_path,
                                       const std::string &hyp_dir,
                                       const ScoreOptions &options) {
  const std::vector<SessionManifest> sessions =
      detail::select_sessions(ref_manifest_path, options, true);
  const std::filesystem::path base =
      std::filesystem::path(ref_manifest_path).parent_path();

  nlohmann::json per_session = nlohmann::json::array();
  nlohmann::json missing = nlohmann::json::array();
  double sum_si_sdr = 0.0;
  double sum_delta = 0.0;
  int scored = 0;

  for (const SessionManifest &m : sessions) {
    std::vector<std::vector<double>> references;
    for (const SourceEntry &source : m.sources) {
      WavData wav = read_wav((base / source.path).string());
      if (wav.sample_rate != m.sample_rate) {
        throw std::runtime_error("sample rate mismatch in " + source.path);
      }
      references.push_back(std::move(wav.samples));
    }
    const WavData mixture = read_wav((base / m.mixture_path).string());

    const size_t n = references.size();
    std::vector<std::vector<double>> estimates;
    bool is_missing = false;
    const std::filesystem::path session_dir =
        std::filesystem::path(hyp_dir) / m.session_id;
    for (size_t i = 0; i < n; ++i) {
      const std::filesystem::path est =
          session_dir / ("est_" + std::to_string(i) + ".wav");
      if (!std::filesystem::exists(est)) {
        is_missing = true;
        break;
      }
      WavData wav = read_wav(est.string());
      if (wav.samples.size() != references[i].size()) {
        throw std::runtime_error("estimate length mismatch: " + est.string());
      }
      estimates.push_back(std::move(wav.samples));
    }
    if (is_missing) {
      missing.push_back(m.session_id);
      if (options.skip_missing) continue;
      estimates.assign(n, mixture.samples);
    }

    const PermutationResult best = upit_assign(estimates, references);
    double baseline = 0.0;
    for (const auto &reference : references) {
      baseline += si_snr(mixture.samples, reference);
    }
    baseline /= static_cast<double>(n);
    const double delta = best.score - baseline;

    per_session.push_back({{"session_id", m.session_id},
                           {"si_sdr", best.score},
                           {"delta_si_sdr", delta},
                           {"assignment", best.assignment},
                           {"missing", is_missing}});
    sum_si_sdr += best.score;
    sum_delta += delta;
    ++scored;
  }

  if (scored == 0) throw std::runtime_error("no sessions scored");
  return nlohmann::json{
      {"kind", "separation"},
      {"per_session", per_session},
      {"missing", missing},
      {"aggregate",
       {{"sessions", scored},
        {"si_sdr", sum_si_sdr / scored},
        {"delta_si_sdr", sum_delta / scored}}}};
}

// Scores transcripts. Per session the concatenated minimum-permutation word
// error rate is computed; the aggregate pools error and word counts across
// sessions before dividing. Speaker-counting accuracy compares the manifest
// speaker count with the hypothesis count.
inline nlohmann::json score_asr(const std::string &ref_manifest_path,
                                const std::string &hyp_path,
                                const ScoreOptions &options) {
  const std::vector<SessionManifest> sessions =
      detail::select_sessions(ref_manifest_path, options, false);
  const std::map<std::string, detail::HypothesisTranscript> hypotheses =
      detail::read_hypothesis_transcripts(hyp_path, options.sc_token);

  nlohmann::json per_session = nlohmann::json::array();
  nlohmann::json missing = nlohmann::json::array();
  WerCounts pooled;
  std::vector<std::pair<int, int>> counting_pairs;
  int scored = 0;

  for (const SessionManifest &m : sessions) {
    const std::vector<std::string> ref_streams = detail::reference_streams(m);
    const int ref_count = static_cast<int>(m.sources.size());

    std::vector<std::string> hyp_streams;
    int hyp_count = 0;
    auto it = hypotheses.find(m.session_id);
    const bool is_missing = it == hypotheses.end();
    if (is_missing) {
      missing.push_back(m.session_id);
      if (options.skip_missing) continue;
    } else {
      hyp_streams = it->second.streams;
      hyp_count = it->second.num_speakers;
    }

    CpWerResult result;
    try {
      result = cpwer(ref_streams, hyp_streams, options.normalization);
    } catch (const std::invalid_argument &e) {
      throw std::runtime_error("session " + m.session_id + ": " + e.what());
    }
    pooled.substitutions += result.counts.substitutions;
    pooled.insertions += result.counts.insertions;
    pooled.deletions += result.counts.deletions;
    pooled.ref_words += result.counts.ref_words;
    counting_pairs.emplace_back(ref_count, hyp_count);

    per_session.push_back({{"session_id", m.session_id},
                           {"cpwer", result.rate},
                           {"substitutions", result.counts.substitutions},
                           {"insertions", result.counts.insertions},
                           {"deletions", result.counts.deletions},
                           {"ref_words", result.counts.ref_words},
                           {"ref_speakers", ref_count},
                           {"hyp_speakers", hyp_count},
                           {"missing", is_missing}});
    ++scored;
  }

  if (scored == 0) throw std::runtime_error("no sessions scored");
  if (pooled.ref_words == 0) {
    throw std::runtime_error("empty reference over all scored sessions");
  }
  return nlohmann::json{
      {"kind", "asr"},
      {"per_session", per_session},
      {"missing", missing},
      {"aggregate",
       {{"sessions", scored},
        {"cpwer", static_cast<double>(pooled.errors()) / pooled.ref_words},
        {"substitutions", pooled.substitutions},
        {"insertions", pooled.insertions},
        {"deletions", pooled.deletions},
        {"ref_words", pooled.ref_words},
        {"speaker_counting_accuracy",
         speaker_counting_accuracy(counting_pairs)}}}};
}

// Scores diarization output (RTTM) against the manifest timing. Aggregate
// error time is pooled over sessions before dividing by pooled reference
// time. Missing sessions count as fully missed speech unless skip_missing.
inline nlohmann::json score_diarization(const std::string &ref_manifest_path,
                                        const std::string &hyp_rttm_path,
                                        const ScoreOptions &options) {
  const std::vector<SessionManifest> sessions =
      detail::select_sessions(ref_manifest_path, options, false);

  std::ifstream in(hyp_rttm_path);
  if (!in) {
    throw std::runtime_error("cannot open hypothesis rttm: " + hyp_rttm_path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::map<std::string, std::vector<Segment>> hyp_by_recording;
  for (Segment &s : parse_rttm(buffer.str())) {
    hyp_by_recording[s.recording_id].push_back(std::move(s));
  }

  nlohmann::json per_session = nlohmann::json::array();
  nlohmann::json missing = nlohmann::json::array();
  double pooled_error = 0.0;
  double pooled_reference = 0.0;
  int scored = 0;

  for (const SessionManifest &m : sessions) {
    const std::vector<Segment> ref = detail::reference_segments(m);
    auto it = hyp_by_recording.find(m.session_id);
    const bool is_missing = it == hyp_by_recording.end();
    if (is_missing) {
      missing.push_back(m.session_id);
      if (options.skip_missing) continue;
    }
    const std::vector<Segment> hyp =
        is_missing ? std::vector<Segment>{} : it->second;
    const DerResult result =
        der(ref, hyp, options.collar, options.score_overlap);
    pooled_error += result.missed_time + result.false_alarm_time +
                    result.confusion_time;
    pooled_reference += result.total_reference_time;
    per_session.push_back({{"session_id", m.session_id},
                           {"der", result.der},
                           {"missed", result.missed_time},
                           {"false_alarm", result.false_alarm_time},
                           {"confusion", result.confusion_time},
                           {"reference_time", result.total_reference_time},
                           {"missing", is_missing}});
    ++scored;
  }

  if (scored == 0) throw std::runtime_error("no sessions scored");
  return nlohmann::json{{"kind", "diarization"},
                        {"per_session", per_session},
                        {"missing", missing},
                        {"aggregate",
                         {{"sessions", scored},
                          {"der", pooled_error / pooled_reference},
                          {"reference_time", pooled_reference}}}};
}

}  // namespace mixsim

#endif  // MIXSIM_SCORE_HPP_
