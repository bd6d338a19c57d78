// include/mixsim/rttm.hpp

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

#ifndef MIXSIM_RTTM_HPP_
#define MIXSIM_RTTM_HPP_

#include <charconv>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixsim {

// One speech region of one speaker inside one recording.
struct Segment {
  std::string recording_id;
  std::string speaker_id;
  double onset = 0.0;     // seconds
  double duration = 0.0;  // seconds

  double offset() const { return onset + duration; }
};

inline bool operator==(const Segment &a, const Segment &b) {
  return a.recording_id == b.recording_id && a.speaker_id == b.speaker_id &&
         a.onset == b.onset && a.duration == b.duration;
}

namespace detail {

inline std::optional<double> parse_double_token(const std::string &token) {
  double value = 0.0;
  const char *first = token.data();
  const char *last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

}  // namespace detail

// Parses RTTM text. SPEAKER records carry the segmentation; any other record
// type is ignored. Fields (1-based): 2 recording id, 4 onset, 5 duration,
// 8 speaker id.
inline std::vector<Segment> parse_rttm(const std::string &text) {
  std::vector<Segment> segments;
  std::istringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    std::string token;
    while (fields >> token) tokens.push_back(token);
    if (tokens.empty()) continue;
    if (tokens[0] != "SPEAKER") continue;
    if (tokens.size() < 9) {
      throw std::runtime_error("rttm parse error at line " +
                               std::to_string(line_number) +
                               ": expected at least 9 fields, got " +
                               std::to_string(tokens.size()));
    }
    const auto onset = detail::parse_double_token(tokens[3]);
    if (!onset || *onset < 0.0) {
      throw std::runtime_error("rttm parse error at line " +
                               std::to_string(line_number) + ": bad onset '" +
                               tokens[3] + "'");
    }
    const auto duration = detail::parse_double_token(tokens[4]);
    if (!duration || *duration <= 0.0) {
      throw std::runtime_error("rttm parse error at line " +
                               std::to_string(line_number) +
                               ": bad duration '" + tokens[4] + "'");
    }
    Segment segment;
    segment.recording_id = tokens[1];
    segment.speaker_id = tokens[7];
    segment.onset = *onset;
    segment.duration = *duration;
    segments.push_back(std::move(segment));
  }
  return segments;
}

// Formats one SPEAKER record. Times carry 3 decimal places.
inline std::string format_rttm_line(const std::string &recording_id,
                                    const std::string &speaker_id, double onset,
                                    double duration) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), " 1 %.3f %.3f <NA> <NA> ", onset,
                duration);
  return "SPEAKER " + recording_id + buffer + speaker_id + " <NA> <NA>";
}

}  // namespace mixsim

#endif  // MIXSIM_RTTM_HPP_
