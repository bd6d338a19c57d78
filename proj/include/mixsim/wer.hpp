// include/mixsim/wer.hpp

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

#ifndef MIXSIM_WER_HPP_
#define MIXSIM_WER_HPP_

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixsim {

struct TextNormalization {
  bool lowercase = true;
  bool strip_punctuation = true;
};

// Whitespace tokenization after optional lowercasing and punctuation
// removal. Punctuation characters are deleted in place, so "don't" becomes
// "dont" rather than two tokens.
inline std::vector<std::string> tokenize(
    const std::string &text, const TextNormalization &norm = {}) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (unsigned char c : text) {
    if (norm.strip_punctuation && std::ispunct(c)) continue;
    cleaned.push_back(norm.lowercase
                          ? static_cast<char>(std::tolower(c))
                          : static_cast<char>(c));
  }
  std::vector<std::string> tokens;
  std::istringstream stream(cleaned);
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

struct WerCounts {
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int ref_words = 0;

  int errors() const { return substitutions + insertions + deletions; }
};

// Minimal edit distance with unit costs, with the error decomposition
// recovered by backtrace. Ties prefer match/substitution, then deletion,
// then insertion.
inline WerCounts wer(const std::vector<std::string> &ref,
                     const std::vector<std::string> &hyp) {
  const size_t m = ref.size();
  const size_t n = hyp.size();
  std::vector<std::vector<int>> cost(m + 1, std::vector<int>(n + 1, 0));
  for (size_t i = 0; i <= m; ++i) cost[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= n; ++j) cost[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= m; ++i) {
    for (size_t j = 1; j <= n; ++j) {
      const int sub = cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const int del = cost[i - 1][j] + 1;
      const int ins = cost[i][j - 1] + 1;
      cost[i][j] = std::min({sub, del, ins});
    }
  }

  WerCounts counts;
  counts.ref_words = static_cast<int>(m);
  size_t i = m, j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        cost[i][j] == cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++counts.substitutions;
      --i;
      --j;
    } else if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      ++counts.deletions;
      --i;
    } else {
      ++counts.insertions;
      --j;
    }
  }
  return counts;
}

struct CpWerResult {
  double rate = 0.0;
  // permutation[i] = hypothesis stream matched to reference stream i.
  std::vector<int> permutation;
  WerCounts counts;
};

// Concatenated minimum-permutation word error rate over per-speaker streams.
// Reference stream i holds speaker i's utterances concatenated in start
// order; hypothesis streams are speaker-agnostic. The shorter side is padded
// with empty streams, and the permutation minimizing the pooled word error
// rate is chosen (ties keep the lexicographically smallest permutation).
inline CpWerResult cpwer(const std::vector<std::string> &ref_streams,
                         const std::vector<std::string> &hyp_streams,
                         const TextNormalization &norm = {}) {
  const size_t n = std::max(ref_streams.size(), hyp_streams.size());
  if (n == 0) throw std::invalid_argument("cpwer: no streams");
  if (n > 4) {
    throw std::invalid_argument("cpwer: at most 4 streams, got " +
                                std::to_string(n));
  }

  std::vector<std::vector<std::string>> ref_tokens(n);
  std::vector<std::vector<std::string>> hyp_tokens(n);
  int total_ref_words = 0;
  for (size_t i = 0; i < n; ++i) {
    if (i < ref_streams.size()) ref_tokens[i] = tokenize(ref_streams[i], norm);
    if (i < hyp_streams.size()) hyp_tokens[i] = tokenize(hyp_streams[i], norm);
    total_ref_words += static_cast<int>(ref_tokens[i].size());
  }
  if (total_ref_words == 0) {
    throw std::runtime_error("cpwer: empty reference");
  }

  std::vector<std::vector<WerCounts>> pair(n, std::vector<WerCounts>(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      pair[i][j] = wer(ref_tokens[i], hyp_tokens[j]);
    }
  }

  std::vector<int> permutation(n);
  std::iota(permutation.begin(), permutation.end(), 0);
  CpWerResult best;
  int best_errors = -1;
  do {
    int errors = 0;
    for (size_t i = 0; i < n; ++i) errors += pair[i][permutation[i]].errors();
    if (best_errors < 0 || errors < best_errors) {
      best_errors = errors;
      best.permutation = permutation;
    }
  } while (std::next_permutation(permutation.begin(), permutation.end()));

  best.counts = WerCounts{};
  for (size_t i = 0; i < n; ++i) {
    const WerCounts &c = pair[i][best.permutation[i]];
    best.counts.substitutions += c.substitutions;
    best.counts.insertions += c.insertions;
    best.counts.deletions += c.deletions;
  }
  best.counts.ref_words = total_ref_words;
  best.rate = static_cast<double>(best.counts.errors()) /
              static_cast<double>(total_ref_words);
  return best;
}

// Convenience overload: references given per speaker as ordered transcript
// lists.
inline CpWerResult cpwer(
    const std::map<std::string, std::vector<std::string>> &ref_by_speaker,
    const std::vector<std::string> &hyp_streams,
    const TextNormalization &norm = {}) {
  std::vector<std::string> ref_streams;
  for (const auto &[speaker, transcripts] : ref_by_speaker) {
    std::string stream;
    for (const std::string &t : transcripts) {
      if (!stream.empty() && !t.empty()) stream += ' ';
      stream += t;
    }
    ref_streams.push_back(std::move(stream));
  }
  return cpwer(ref_streams, hyp_streams, norm);
}

}  // namespace mixsim

#endif  // MIXSIM_WER_HPP_
