// src/wav.cc

// Copyright 2026  The csaug authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "csaug/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "csaug/errors.h"

namespace csaug {

namespace {

uint32_t read_u32(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}

uint16_t read_u16(const uint8_t* p) { return uint16_t(p[0]) | uint16_t(p[1]) << 8; }

void put_u32(std::string& s, uint32_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char((v >> 8) & 0xff));
  s.push_back(char((v >> 16) & 0xff));
  s.push_back(char((v >> 24) & 0xff));
}

void put_u16(std::string& s, uint16_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char((v >> 8) & 0xff));
}

}  // namespace

WavData read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open audio file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw DataError(path + ": not a RIFF/WAVE file");
  }

  WavData wav;
  bool have_fmt = false, have_data = false;
  uint16_t format = 0, channels = 0, bits = 0;
  size_t pos = 12;
  size_t data_begin = 0, data_len = 0;

  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    uint32_t len = read_u32(bytes.data() + pos + 4);
    pos += 8;
    if (pos + len > bytes.size()) throw DataError(path + ": truncated chunk");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) throw DataError(path + ": short fmt chunk");
      format = read_u16(bytes.data() + pos);
      channels = read_u16(bytes.data() + pos + 2);
      wav.sample_rate_hz = int(read_u32(bytes.data() + pos + 4));
      bits = read_u16(bytes.data() + pos + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_begin = pos;
      data_len = len;
      have_data = true;
    }
    pos += len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || !have_data) throw DataError(path + ": missing fmt or data chunk");
  if (format != 1) throw DataError(path + ": only uncompressed PCM is supported");
  if (channels != 1) throw DataError(path + ": only mono audio is supported");
  if (bits != 16) throw DataError(path + ": only 16-bit PCM is supported");

  size_t n = data_len / 2;
  wav.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    int16_t s = int16_t(read_u16(bytes.data() + data_begin + 2 * i));
    wav.samples[i] = float(s) / 32768.0f;
  }
  return wav;
}

void write_wav(const std::string& path, int sample_rate_hz,
               std::span<const float> samples) {
  if (sample_rate_hz <= 0) throw ConfigError("write_wav: non-positive sample rate");
  std::string buf;
  uint32_t data_len = uint32_t(samples.size() * 2);
  buf.reserve(44 + data_len);
  buf += "RIFF";
  put_u32(buf, 36 + data_len);
  buf += "WAVE";
  buf += "fmt ";
  put_u32(buf, 16);
  put_u16(buf, 1);  // PCM
  put_u16(buf, 1);  // mono
  put_u32(buf, uint32_t(sample_rate_hz));
  put_u32(buf, uint32_t(sample_rate_hz) * 2);
  put_u16(buf, 2);
  put_u16(buf, 16);
  buf += "data";
  put_u32(buf, data_len);
  for (float f : samples) {
    float clamped = std::clamp(f, -1.0f, 32767.0f / 32768.0f);
    auto s = int16_t(std::lround(clamped * 32768.0f));
    put_u16(buf, uint16_t(s));
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open audio file for writing: " + path);
  out.write(buf.data(), std::streamsize(buf.size()));
  if (!out) throw DataError("failed writing audio file: " + path);
}

}  // namespace csaug
