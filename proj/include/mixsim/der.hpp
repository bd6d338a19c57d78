// include/mixsim/der.hpp

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

#ifndef MIXSIM_DER_HPP_
#define MIXSIM_DER_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixsim/rttm.hpp"

namespace mixsim {

namespace detail {

// Minimum-cost assignment (Kuhn-Munkres with potentials). cost is n x m with
// n <= m; returns for each row the column it is assigned to.
inline std::vector<int> min_cost_assignment(
    const std::vector<std::vector<double>> &cost) {
  const int n = static_cast<int>(cost.size());
  const int m = n == 0 ? 0 : static_cast<int>(cost[0].size());
  if (n == 0) return {};
  if (n > m) throw std::invalid_argument("assignment: need rows <= cols");
  const double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

}  // namespace detail

struct DerResult {
  double der = 0.0;
  double missed_time = 0.0;
  double false_alarm_time = 0.0;
  double confusion_time = 0.0;
  double total_reference_time = 0.0;
  // Reference speaker -> hypothesis speaker pairs with nonzero overlap.
  std::vector<std::pair<std::string, std::string>> speaker_mapping;
};

// Diarization error rate for one recording. The timeline is cut at every
// segment boundary; a collar removes a no-score zone of the given total
// width centred on each reference boundary. The reference-to-hypothesis
// speaker mapping maximizes total overlapped time (optimal bipartite
// matching). Overlapped regions count with speaker multiplicity; pass
// score_overlap = false to exclude regions where two or more reference
// speakers are active.
inline DerResult der(const std::vector<Segment> &ref,
                     const std::vector<Segment> &hyp, double collar = 0.0,
                     bool score_overlap = true) {
  if (collar < 0.0) throw std::invalid_argument("der: collar must be >= 0");

  std::vector<std::string> ref_speakers, hyp_speakers;
  for (const Segment &s : ref) ref_speakers.push_back(s.speaker_id);
  for (const Segment &s : hyp) hyp_speakers.push_back(s.speaker_id);
  auto uniq = [](std::vector<std::string> *v) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  };
  uniq(&ref_speakers);
  uniq(&hyp_speakers);
  if (ref_speakers.size() > 64 || hyp_speakers.size() > 64) {
    throw std::invalid_argument("der: more than 64 speakers unsupported");
  }
  std::map<std::string, int> ref_index, hyp_index;
  for (size_t i = 0; i < ref_speakers.size(); ++i) ref_index[ref_speakers[i]] = static_cast<int>(i);
  for (size_t i = 0; i < hyp_speakers.size(); ++i) hyp_index[hyp_speakers[i]] = static_cast<int>(i);

  std::vector<std::pair<double, double>> no_score;
  if (collar > 0.0) {
    for (const Segment &s : ref) {
      no_score.emplace_back(s.onset - collar / 2.0, s.onset + collar / 2.0);
      no_score.emplace_back(s.offset() - collar / 2.0,
                            s.offset() + collar / 2.0);
    }
  }

  std::vector<double> boundaries;
  for (const Segment &s : ref) {
    boundaries.push_back(s.onset);
    boundaries.push_back(s.offset());
  }
  for (const Segment &s : hyp) {
    boundaries.push_back(s.onset);
    boundaries.push_back(s.offset());
  }
  for (const auto &[lo, hi] : no_score) {
    boundaries.push_back(lo);
    boundaries.push_back(hi);
  }
  std::sort(boundaries.begin(), boundaries.end());
  boundaries.erase(std::unique(boundaries.begin(), boundaries.end()),
                   boundaries.end());

  struct Interval {
    double length = 0.0;
    uint64_t ref_mask = 0;
    uint64_t hyp_mask = 0;
  };
  std::vector<Interval> intervals;
  const size_t nr = ref_speakers.size();
  const size_t nh = hyp_speakers.size();
  std::vector<std::vector<double>> overlap(nr, std::vector<double>(nh, 0.0));
  double total_reference = 0.0;

  for (size_t b = 0; b + 1 < boundaries.size(); ++b) {
    const double t0 = boundaries[b];
    const double t1 = boundaries[b + 1];
    if (!(t1 > t0)) continue;
    const double mid = 0.5 * (t0 + t1);
    bool excluded = false;
    for (const auto &[lo, hi] : no_score) {
      if (mid >= lo && mid < hi) {
        excluded = true;
        break;
      }
    }
    if (excluded) continue;

    Interval interval;
    interval.length = t1 - t0;
    for (const Segment &s : ref) {
      if (s.onset <= mid && mid < s.offset()) {
        interval.ref_mask |= uint64_t{1} << ref_index[s.speaker_id];
      }
    }
    if (!score_overlap &&
        __builtin_popcountll(interval.ref_mask) >= 2) {
      continue;
    }
    for (const Segment &s : hyp) {
      if (s.onset <= mid && mid < s.offset()) {
        interval.hyp_mask |= uint64_t{1} << hyp_index[s.speaker_id];
      }
    }
    total_reference +=
        interval.length * __builtin_popcountll(interval.ref_mask);
    for (size_t r = 0; r < nr; ++r) {
      if (!(interval.ref_mask >> r & 1)) continue;
      for (size_t h = 0; h < nh; ++h) {
        if (interval.hyp_mask >> h & 1) overlap[r][h] += interval.length;
      }
    }
    intervals.push_back(interval);
  }

  if (!(total_reference > 0.0)) {
    throw std::runtime_error("der: zero reference speech time");
  }

  // Optimal speaker mapping on total overlap; negate to minimize.
  std::vector<std::pair<int, int>> mapping;
  if (nr > 0 && nh > 0) {
    const bool transpose = nr > nh;
    const size_t rows = transpose ? nh : nr;
    const size_t cols = transpose ? nr : nh;
    std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
    for (size_t i = 0; i < rows; ++i) {
      for (size_t j = 0; j < cols; ++j) {
        cost[i][j] = -(transpose ? overlap[j][i] : overlap[i][j]);
      }
    }
    const std::vector<int> assignment = detail::min_cost_assignment(cost);
    for (size_t i = 0; i < rows; ++i) {
      const int j = assignment[i];
      if (j < 0) continue;
      const int r = transpose ? j : static_cast<int>(i);
      const int h = transpose ? static_cast<int>(i) : j;
      if (overlap[r][h] > 0.0) mapping.emplace_back(r, h);
    }
  }

  DerResult result;
  result.total_reference_time = total_reference;
  for (const Interval &interval : intervals) {
    const int active_ref = __builtin_popcountll(interval.ref_mask);
    const int active_hyp = __builtin_popcountll(interval.hyp_mask);
    int matched = 0;
    for (const auto &[r, h] : mapping) {
      if ((interval.ref_mask >> r & 1) && (interval.hyp_mask >> h & 1)) {
        ++matched;
      }
    }
    result.missed_time +=
        interval.length * std::max(0, active_ref - active_hyp);
    result.false_alarm_time +=
        interval.length * std::max(0, active_hyp - active_ref);
    result.confusion_time +=
        interval.length * (std::min(active_ref, active_hyp) - matched);
  }
  result.der = (result.missed_time + result.false_alarm_time +
                result.confusion_time) /
               total_reference;
  for (const auto &[r, h] : mapping) {
    result.speaker_mapping.emplace_back(ref_speakers[r], hyp_speakers[h]);
  }
  return result;
}

}  // namespace mixsim

#endif  // MIXSIM_DER_HPP_
