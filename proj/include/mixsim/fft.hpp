// include/mixsim/fft.hpp

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

#ifndef MIXSIM_FFT_HPP_
#define MIXSIM_FFT_HPP_

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace mixsim {

inline size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 transform. Size must be a power of two. The
// inverse pass divides by the size.
inline void fft_inplace(std::vector<std::complex<double>> *data,
                        bool inverse) {
  const size_t n = data->size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("fft size must be a power of two");
  }
  auto &a = *data;

  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const double angle = 2.0 * M_PI / static_cast<double>(len) *
                         (inverse ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    for (auto &x : a) x /= static_cast<double>(n);
  }
}

// Full linear convolution, quadratic time. Used for short inputs and as the
// reference for the frequency-domain path.
inline std::vector<double> convolve_direct(std::span<const double> a,
                                           std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("convolve: empty input");
  }
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      out[i + j] += ai * b[j];
    }
  }
  return out;
}

// Full linear convolution via frequency-domain overlap-add: the signal is
// cut into blocks, each block is multiplied with the kernel spectrum, and
// block results are summed at their positions.
inline std::vector<double> convolve_fft(std::span<const double> signal,
                                        std::span<const double> kernel) {
  if (signal.empty() || kernel.empty()) {
    throw std::invalid_argument("convolve: empty input");
  }
  const size_t m = kernel.size();
  const size_t fft_size = next_pow2(std::max<size_t>(512, 2 * m));
  const size_t block = fft_size - m + 1;

  std::vector<std::complex<double>> kernel_fft(fft_size);
  for (size_t i = 0; i < m; ++i) kernel_fft[i] = kernel[i];
  fft_inplace(&kernel_fft, false);

  std::vector<double> out(signal.size() + m - 1, 0.0);
  std::vector<std::complex<double>> buffer(fft_size);
  for (size_t pos = 0; pos < signal.size(); pos += block) {
    const size_t len = std::min(block, signal.size() - pos);
    std::fill(buffer.begin(), buffer.end(), std::complex<double>(0.0, 0.0));
    for (size_t i = 0; i < len; ++i) buffer[i] = signal[pos + i];
    fft_inplace(&buffer, false);
    for (size_t i = 0; i < fft_size; ++i) buffer[i] *= kernel_fft[i];
    fft_inplace(&buffer, true);
    const size_t copy = std::min(fft_size, out.size() - pos);
    for (size_t i = 0; i < copy; ++i) out[pos + i] += buffer[i].real();
  }
  return out;
}

}  // namespace mixsim

#endif  // MIXSIM_FFT_HPP_
