// include/mixsim/metrics.hpp

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

#ifndef MIXSIM_METRICS_HPP_
#define MIXSIM_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mixsim {

// Scores are clamped to +/-120 dB so a perfect (or hopeless) estimate stays
// finite.
inline constexpr double kSiSnrCapDb = 120.0;

// Scale-invariant signal-to-noise ratio in dB. Both signals are normalized
// to zero mean; the reference is scaled to the orthogonal projection of the
// estimate, and the ratio of projection power to residual power is reported:
//   s_target = (<est, ref> / <ref, ref>) * ref
//   e        = est - s_target
//   si_snr   = 10 log10(|s_target|^2 / (|e|^2 + 1e-12 |s_target|^2))
inline double si_snr(std::span<const double> estimate,
                     std::span<const double> reference) {
  if (estimate.size() != reference.size()) {
    throw std::invalid_argument("si_snr: length mismatch");
  }
  if (estimate.size() < 2) {
    throw std::invalid_argument("si_snr: need at least 2 samples");
  }
  const size_t n = estimate.size();
  double est_mean = 0.0, ref_mean = 0.0;
  for (size_t i = 0; i < n; ++i) {
    est_mean += estimate[i];
    ref_mean += reference[i];
  }
  est_mean /= static_cast<double>(n);
  ref_mean /= static_cast<double>(n);

  double dot = 0.0, ref_energy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double e = estimate[i] - est_mean;
    const double r = reference[i] - ref_mean;
    dot += e * r;
    ref_energy += r * r;
  }
  if (!(ref_energy > 0.0)) {
    throw std::invalid_argument("si_snr: reference is zero after zero-mean");
  }

  const double scale = dot / ref_energy;
  const double target_energy = scale * scale * ref_energy;
  double error_energy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double e = estimate[i] - est_mean;
    const double r = reference[i] - ref_mean;
    const double residual = e - scale * r;
    error_energy += residual * residual;
  }

  if (!(target_energy > 0.0)) return -kSiSnrCapDb;
  const double ratio =
      target_energy / (error_energy + 1e-12 * target_energy);
  const double db = 10.0 * std::log10(ratio);
  return std::clamp(db, -kSiSnrCapDb, kSiSnrCapDb);
}

// Pairing of estimated sources with reference sources, plus the mean
// pairwise si_snr achieved under it.
struct PermutationResult {
  std::vector<int> assignment;  // assignment[i] = reference index for estimate i
  double score = 0.0;           // dB
};

// Exhaustive permutation search (at most 4 sources, so at most 24
// candidates). Returns the assignment maximizing mean pairwise si_snr; ties
// keep the lexicographically smallest assignment.
inline PermutationResult upit_assign(
    const std::vector<std::vector<double>> &estimates,
    const std::vector<std::vector<double>> &references) {
  if (estimates.size() != references.size()) {
    throw std::invalid_argument("upit_assign: source count mismatch");
  }
  const size_t n = estimates.size();
  if (n == 0) throw std::invalid_argument("upit_assign: no sources");
  if (n > 4) throw std::invalid_argument("upit_assign: at most 4 sources");

  std::vector<std::vector<double>> pair_score(n, std::vector<double>(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      pair_score[i][j] = si_snr(estimates[i], references[j]);
    }
  }

  std::vector<int> permutation(n);
  std::iota(permutation.begin(), permutation.end(), 0);
  PermutationResult best;
  best.score = -std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) total += pair_score[i][permutation[i]];
    const double mean = total / static_cast<double>(n);
    if (mean > best.score) {
      best.score = mean;
      best.assignment = permutation;
    }
  } while (std::next_permutation(permutation.begin(), permutation.end()));
  return best;
}

// Separation improvement: best-permutation mean si_snr of the estimates
// minus the mean si_snr obtained by presenting the unprocessed mixture as
// the estimate of every reference.
inline double delta_si_sdr(const std::vector<std::vector<double>> &estimates,
                           const std::vector<std::vector<double>> &references,
                           const std::vector<double> &mixture) {
  const PermutationResult best = upit_assign(estimates, references);
  double baseline = 0.0;
  for (const std::vector<double> &reference : references) {
    baseline += si_snr(mixture, reference);
  }
  baseline /= static_cast<double>(references.size());
  return best.score - baseline;
}

// Fraction of (reference count, hypothesis count) pairs that agree.
inline double speaker_counting_accuracy(
    const std::vector<std::pair<int, int>> &pairs) {
  if (pairs.empty()) {
    throw std::invalid_argument("speaker_counting_accuracy: no pairs");
  }
  size_t correct = 0;
  for (const auto &[ref, hyp] : pairs) {
    if (ref == hyp) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

}  // namespace mixsim

#endif  // MIXSIM_METRICS_HPP_
