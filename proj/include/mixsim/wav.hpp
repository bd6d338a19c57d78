// include/mixsim/wav.hpp

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

#ifndef MIXSIM_WAV_HPP_
#define MIXSIM_WAV_HPP_

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixsim {

// Mono audio in doubles, nominally in [-1, 1).
struct WavData {
  std::vector<double> samples;
  int sample_rate = 0;
};

namespace detail {

inline uint32_t read_u32le(const unsigned char *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

inline uint16_t read_u16le(const unsigned char *p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32le(std::string *out, uint32_t v) {
  out->push_back(static_cast<char>(v & 0xFF));
  out->push_back(static_cast<char>((v >> 8) & 0xFF));
  out->push_back(static_cast<char>((v >> 16) & 0xFF));
  out->push_back(static_cast<char>((v >> 24) & 0xFF));
}

inline void put_u16le(std::string *out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xFF));
  out->push_back(static_cast<char>((v >> 8) & 0xFF));
}

}  // namespace detail

// Reads a RIFF WAV file. Only 16-bit PCM mono is accepted; anything else is
// an error rather than a silent conversion.
inline WavData read_wav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open wav file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("not a RIFF/WAVE file: " + path);
  }

  bool have_fmt = false;
  int sample_rate = 0;
  size_t data_offset = 0;
  size_t data_size = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char *chunk_id = reinterpret_cast<const char *>(bytes.data() + pos);
    const uint32_t chunk_size = detail::read_u32le(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      throw std::runtime_error("truncated wav chunk in " + path);
    }
    if (std::memcmp(chunk_id, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw std::runtime_error("short fmt chunk: " + path);
      const uint16_t format = detail::read_u16le(bytes.data() + body);
      const uint16_t channels = detail::read_u16le(bytes.data() + body + 2);
      sample_rate =
          static_cast<int>(detail::read_u32le(bytes.data() + body + 4));
      const uint16_t bits = detail::read_u16le(bytes.data() + body + 14);
      if (format != 1 || bits != 16) {
        throw std::runtime_error("unsupported wav encoding (want 16-bit PCM): " +
                                 path);
      }
      if (channels != 1) {
        throw std::runtime_error("unsupported channel count (want mono): " +
                                 path);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk_id, "data", 4) == 0) {
      data_offset = body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }
  if (!have_fmt || data_offset == 0) {
    throw std::runtime_error("missing fmt/data chunk: " + path);
  }

  WavData wav;
  wav.sample_rate = sample_rate;
  const size_t n = data_size / 2;
  wav.samples.resize(n);
  const unsigned char *p = bytes.data() + data_offset;
  for (size_t i = 0; i < n; ++i) {
    const int16_t s =
        static_cast<int16_t>(detail::read_u16le(p + 2 * i));
    wav.samples[i] = static_cast<double>(s) / 32768.0;
  }
  return wav;
}

inline int16_t quantize_pcm16(double x) {
  const long v = std::lround(x * 32768.0);
  if (v > 32767) return 32767;
  if (v < -32768) return -32768;
  return static_cast<int16_t>(v);
}

// Writes mono 16-bit PCM. No dither: the same samples always produce the
// same bytes.
inline void write_wav(const std::string &path,
                      const std::vector<double> &samples, int sample_rate) {
  if (sample_rate <= 0) {
    throw std::invalid_argument("write_wav: sample rate must be positive");
  }
  const uint32_t data_size = static_cast<uint32_t>(samples.size() * 2);
  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  detail::put_u32le(&out, 36 + data_size);
  out.append("WAVE");
  out.append("fmt ");
  detail::put_u32le(&out, 16);
  detail::put_u16le(&out, 1);  // PCM
  detail::put_u16le(&out, 1);  // mono
  detail::put_u32le(&out, static_cast<uint32_t>(sample_rate));
  detail::put_u32le(&out, static_cast<uint32_t>(sample_rate) * 2);
  detail::put_u16le(&out, 2);
  detail::put_u16le(&out, 16);
  out.append("data");
  detail::put_u32le(&out, data_size);
  for (double x : samples) {
    detail::put_u16le(&out, static_cast<uint16_t>(quantize_pcm16(x)));
  }

  const std::filesystem::path parent =
      std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write wav file: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("short write to wav file: " + path);
}

}  // namespace mixsim

#endif  // MIXSIM_WAV_HPP_
