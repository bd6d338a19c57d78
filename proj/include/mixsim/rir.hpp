// include/mixsim/rir.hpp

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

#ifndef MIXSIM_RIR_HPP_
#define MIXSIM_RIR_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixsim/fft.hpp"
#include "mixsim/room.hpp"

namespace mixsim {

inline constexpr double kSpeedOfSound = 343.0;  // m/s

struct ImpulseResponse {
  std::vector<double> samples;
  int sample_rate = 0;
};

namespace detail {

inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = M_PI * x;
  return std::sin(px) / px;
}

// Half-width of the fractional-delay kernel; 81 taps total.
inline constexpr int kSincHalfWidth = 40;

// One reflected copy of the source along one axis: signed coordinate offset
// from the listener and the number of wall bounces it took.
struct AxisImage {
  double delta = 0.0;
  int reflections = 0;
};

inline std::vector<AxisImage> axis_images(double source, double listener,
                                          double room_dim, int order,
                                          double max_distance) {
  std::vector<AxisImage> images;
  for (int n = -order; n <= order; ++n) {
    for (int q = 0; q <= 1; ++q) {
      const double pos = (1 - 2 * q) * source + 2.0 * n * room_dim;
      const double delta = pos - listener;
      if (std::abs(delta) > max_distance) continue;
      images.push_back({delta, std::abs(n - q) + std::abs(n)});
    }
  }
  return images;
}

// Predicted decay-time measurement for the image lattice with a uniform
// pressure reflection coefficient beta. An image at distance s in direction
// u has roughly s * g(u) wall bounces, g(u) = |u_x|/L_x + |u_y|/L_y +
// |u_z|/L_z, so the arriving energy from that direction decays like
// beta^(2 c t g(u)). The lattice average is NOT a single exponential: the
// low-loss axial directions outlive the diffuse-field average, which is why
// closed-form absorption formulas measure long here. This reproduces the
// measurement itself: Schroeder integration of the predicted arrivals, least
// squares through the -5..-35 dB stretch, extrapolated to -60 dB.
inline double lattice_fit_t60(double beta, const Vec3 &dims, double horizon) {
  constexpr int kDirections = 24;  // per octant angle
  constexpr int kSteps = 400;
  const double a = 2.0 * kSpeedOfSound * std::log(beta);  // < 0

  std::vector<double> weight, decay_step, tail;
  weight.reserve(kDirections * kDirections);
  const double dt = horizon / kSteps;
  for (int i = 0; i < kDirections; ++i) {
    const double theta = (i + 0.5) / kDirections * M_PI / 2.0;
    for (int j = 0; j < kDirections; ++j) {
      const double phi = (j + 0.5) / kDirections * M_PI / 2.0;
      const double g = std::sin(theta) * std::cos(phi) / dims.x +
                       std::sin(theta) * std::sin(phi) / dims.y +
                       std::cos(theta) / dims.z;
      weight.push_back(std::sin(theta) / (-a * g));
      decay_step.push_back(std::exp(a * g * dt));
      tail.push_back(std::exp(a * g * horizon));
    }
  }

  std::vector<double> state(weight.size(), 1.0);
  std::vector<double> schroeder(kSteps + 1, 0.0);
  for (int step = 0; step <= kSteps; ++step) {
    double sum = 0.0;
    for (size_t k = 0; k < weight.size(); ++k) {
      sum += weight[k] * (state[k] - tail[k]);
      state[k] *= decay_step[k];
    }
    schroeder[step] = sum;
  }

  const double total = schroeder[0];
  double st = 0.0, sd = 0.0, stt = 0.0, std_ = 0.0;
  int count = 0;
  for (int step = 0; step <= kSteps; ++step) {
    if (schroeder[step] <= 0.0) break;
    const double db = 10.0 * std::log10(schroeder[step] / total);
    if (db > -5.0) continue;
    if (db < -35.0) break;
    const double t = step * dt;
    st += t;
    sd += db;
    stt += t * t;
    std_ += t * db;
    ++count;
  }
  if (count < 2) return 0.0;
  const double slope = (count * std_ - st * sd) / (count * stt - st * st);
  return -60.0 / slope;
}

// Continuum estimate of the wall reflection coefficient that makes the
// lattice's measured decay time hit the target. Monotone in beta, so plain
// bisection. Used as the starting point for probe calibration.
inline double solve_wall_reflection(const Vec3 &dims, double t60) {
  const double volume = dims.x * dims.y * dims.z;
  const double surface =
      2.0 * (dims.x * dims.y + dims.x * dims.z + dims.y * dims.z);
  const double horizon = t60 + 4.0 * volume / (surface * kSpeedOfSound);
  double lo = 1e-4, hi = 0.9999995;  // pressure reflection bounds
  if (lattice_fit_t60(hi, dims, horizon) < t60) {
    return hi;  // decay target unreachably long; maximum reflection
  }
  for (int iteration = 0; iteration < 50; ++iteration) {
    const double mid = 0.5 * (lo + hi);
    if (lattice_fit_t60(mid, dims, horizon) < t60) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// One-pole high-pass, applied twice. The image sum is all-positive, so the
// dense late tail piles up a nonphysical near-DC component that flattens
// the measured decay; stripping the sub-audio band restores the true
// reflection-loss slope.
inline void highpass_inplace(std::vector<double> *samples, int fs,
                             double cutoff_hz = 80.0) {
  const double a = 1.0 / (1.0 + 2.0 * M_PI * cutoff_hz / fs);
  for (int pass = 0; pass < 2; ++pass) {
    double y = 0.0;
    double prev_x = 0.0;
    for (double &x : *samples) {
      const double current = x;
      y = a * (y + current - prev_x);
      prev_x = current;
      x = y;
    }
  }
}

// Calls visitor(distance, reflections) for every image within max_distance.
// order limits lattice cells per axis; axis spans are additionally pruned by
// the distance bound.
template <typename Visitor>
void enumerate_images(const Vec3 &dims, const Vec3 &source,
                      const Vec3 &listener, int order, double max_distance,
                      Visitor &&visitor) {
  auto axis_order = [&](double dim) {
    const int bound =
        static_cast<int>(std::ceil(max_distance / (2.0 * dim))) + 1;
    return std::min(order, bound);
  };
  const auto xs = axis_images(source.x, listener.x, dims.x,
                              axis_order(dims.x), max_distance);
  const auto ys = axis_images(source.y, listener.y, dims.y,
                              axis_order(dims.y), max_distance);
  const auto zs = axis_images(source.z, listener.z, dims.z,
                              axis_order(dims.z), max_distance);
  const double max_sq = max_distance * max_distance;
  for (const auto &xi : xs) {
    const double xx = xi.delta * xi.delta;
    for (const auto &yi : ys) {
      const double xy = xx + yi.delta * yi.delta;
      if (xy > max_sq) continue;
      for (const auto &zi : zs) {
        const double sq = xy + zi.delta * zi.delta;
        if (sq > max_sq) continue;
        const double d = std::sqrt(sq);
        if (d <= 0.0) continue;
        visitor(d, xi.reflections + yi.reflections + zi.reflections);
      }
    }
  }
}

// Schroeder fit on a per-sample energy profile, same convention as the
// waveform measurement: least squares through -5..-35 dB, extrapolated to
// -60 dB. Returns 0 when the curve is too short to fit.
inline double energy_profile_fit_t60(const std::vector<double> &energy,
                                     int fs) {
  const size_t n = energy.size();
  std::vector<double> schroeder(n + 1, 0.0);
  for (size_t i = n; i-- > 0;) schroeder[i] = schroeder[i + 1] + energy[i];
  const double total = schroeder[0];
  if (!(total > 0.0)) return 0.0;
  double st = 0.0, sd = 0.0, stt = 0.0, std_ = 0.0;
  int count = 0;
  for (size_t i = 0; i < n; ++i) {
    if (schroeder[i] <= 0.0) break;
    const double db = 10.0 * std::log10(schroeder[i] / total);
    if (db > -5.0) continue;
    if (db < -35.0) break;
    const double t = static_cast<double>(i) / fs;
    st += t;
    sd += db;
    stt += t * t;
    std_ += t * db;
    ++count;
  }
  if (count < 2) return 0.0;
  const double slope = (count * std_ - st * sd) / (count * stt - st * st);
  return slope < 0.0 ? -60.0 / slope : 0.0;
}

// Wall absorption for one room: continuum estimate refined against the
// room's actual image lattice. The probe accumulates image energies into
// sample bins (no fractional-delay rendering) from a deterministic probe
// position, measures the decay, and rescales the reflection loss. The probe
// depends only on the room, so every source in a session sees the same
// walls.
inline double calibrated_wall_absorption(const Vec3 &dims, double t60,
                                         const Vec3 &listener) {
  double beta = solve_wall_reflection(dims, t60);
  if (1.0 - beta * beta >= 0.99) return 0.99;

  Vec3 probe;
  probe.x = listener.x + (listener.x < dims.x / 2 ? 0.3 : -0.3) * dims.x;
  probe.y = listener.y + (listener.y < dims.y / 2 ? 0.3 : -0.3) * dims.y;
  probe.z = listener.z + (listener.z < dims.z / 2 ? 0.3 : -0.3) * dims.z;

  constexpr int kProbeFs = 4000;
  const double direct = distance(probe, listener);
  const double max_distance = direct + kSpeedOfSound * t60;
  const double min_dim = std::min({dims.x, dims.y, dims.z});
  const int order =
      static_cast<int>(std::ceil(t60 * kSpeedOfSound / min_dim)) + 1;
  const size_t bins = static_cast<size_t>(
      std::llround((t60 + max_distance / kSpeedOfSound) * kProbeFs)) + 1;

  for (int iteration = 0; iteration < 3; ++iteration) {
    std::vector<double> energy(bins, 0.0);
    const double b = beta;
    enumerate_images(dims, probe, listener, order, max_distance,
                     [&](double d, int reflections) {
                       const double amplitude =
                           std::pow(b, reflections) / (4.0 * M_PI * d);
                       const size_t bin = static_cast<size_t>(
                           d / kSpeedOfSound * kProbeFs);
                       if (bin < energy.size()) {
                         energy[bin] += amplitude * amplitude;
                       }
                     });
    const double measured = energy_profile_fit_t60(energy, kProbeFs);
    if (measured <= 0.0) break;
    const double ratio = measured / t60;
    if (std::abs(ratio - 1.0) <= 0.03) break;
    // Per-image decay rate scales with log(beta); compress the decay curve
    // by the measured excess.
    const double clamped = std::clamp(ratio, 0.25, 4.0);
    beta = std::exp(std::log(beta) * clamped);
    beta = std::clamp(beta, 1e-4, 0.9999995);
  }
  return std::clamp(1.0 - beta * beta, 1e-4, 0.99);
}

}  // namespace detail

// Shoebox image-source impulse response from one source position to the
// listener. All six walls share one absorption coefficient, solved per room
// so that the Schroeder-measured decay of the image lattice hits t60 (and
// clamped to at most 0.99 so arbitrarily short decay targets stay
// near-anechoic rather than failing). Mirror sources are enumerated up to
// max_order reflections per axis (when max_order is 0 the order is derived
// from t60 and the smallest dimension) and rendered with an 81-tap
// Hann-windowed sinc at their fractional delay. Images arriving later than
// the direct path plus t60 carry no audible energy and are skipped.
inline ImpulseResponse generate_rir(const RoomSpec &room,
                                    const std::string &speaker, int fs,
                                    int max_order = 0) {
  auto it = room.sources.find(speaker);
  if (it == room.sources.end()) {
    throw std::runtime_error("no source position for speaker " + speaker);
  }
  if (fs <= 0) throw std::invalid_argument("sample rate must be positive");
  if (!(room.t60 > 0.0)) {
    throw std::runtime_error("t60 infeasible: must be positive");
  }
  const Vec3 &source = it->second;
  const Vec3 &listener = room.listener;
  const double dx = room.dims.x, dy = room.dims.y, dz = room.dims.z;
  if (!(dx > 0.0 && dy > 0.0 && dz > 0.0)) {
    throw std::runtime_error("room dimensions must be positive");
  }

  const double alpha =
      detail::calibrated_wall_absorption(room.dims, room.t60, listener);
  const double beta = std::sqrt(1.0 - alpha);

  const double direct = distance(source, listener);
  const double max_distance = direct + kSpeedOfSound * room.t60;
  const double min_dim = std::min({dx, dy, dz});
  int order = max_order;
  if (order <= 0) {
    order = static_cast<int>(
                std::ceil(room.t60 * kSpeedOfSound / min_dim)) +
            1;
  }

  ImpulseResponse rir;
  rir.sample_rate = fs;
  const size_t length = static_cast<size_t>(
      std::llround((room.t60 + max_distance / kSpeedOfSound) * fs));
  rir.samples.assign(length, 0.0);

  detail::enumerate_images(
      room.dims, source, listener, order, max_distance,
      [&](double d, int reflections) {
        const double amplitude =
            std::pow(beta, reflections) / (4.0 * M_PI * d);
        const double delay = d / kSpeedOfSound * fs;
        const int first = std::max(
            0, static_cast<int>(std::ceil(delay - detail::kSincHalfWidth)));
        const int last = std::min(
            static_cast<int>(length) - 1,
            static_cast<int>(std::floor(delay + detail::kSincHalfWidth)));
        for (int n = first; n <= last; ++n) {
          const double x = n - delay;
          const double window =
              0.5 *
              (1.0 + std::cos(M_PI * x / (detail::kSincHalfWidth + 1)));
          rir.samples[n] += amplitude * detail::sinc(x) * window;
        }
      });
  detail::highpass_inplace(&rir.samples, fs);
  return rir;
}

// Full linear convolution of a signal with an impulse response. Long signals
// take the frequency-domain overlap-add path; short ones are convolved
// directly.
inline std::vector<double> convolve(const std::vector<double> &signal,
                                    const ImpulseResponse &rir,
                                    int signal_sample_rate) {
  if (signal_sample_rate != rir.sample_rate) {
    throw std::invalid_argument(
        "convolve: sample rate mismatch (signal " +
        std::to_string(signal_sample_rate) + " Hz, rir " +
        std::to_string(rir.sample_rate) + " Hz)");
  }
  if (signal.size() > static_cast<size_t>(signal_sample_rate)) {
    return convolve_fft(signal, rir.samples);
  }
  return convolve_direct(signal, rir.samples);
}

}  // namespace mixsim

#endif  // MIXSIM_RIR_HPP_
