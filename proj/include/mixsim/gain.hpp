// include/mixsim/gain.hpp

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

#ifndef MIXSIM_GAIN_HPP_
#define MIXSIM_GAIN_HPP_

#include <cmath>
#include <span>
#include <stdexcept>

namespace mixsim {

// Mean per-sample power.
inline double mean_power(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (double x : samples) sum += x * x;
  return sum / static_cast<double>(samples.size());
}

// Linear scale that makes a source sit snr_db below the reference:
// after scaling, 10*log10(ref_power / scaled_source_power) == snr_db.
inline double compute_gain(double source_power, double ref_power,
                           double snr_db) {
  if (!(source_power > 0.0)) {
    throw std::invalid_argument("compute_gain: source power must be positive");
  }
  if (!(ref_power > 0.0)) {
    throw std::invalid_argument(
        "compute_gain: reference power must be positive");
  }
  return std::sqrt(ref_power / (source_power * std::pow(10.0, snr_db / 10.0)));
}

}  // namespace mixsim

#endif  // MIXSIM_GAIN_HPP_
