// src/features.cc

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

#include "csaug/features.h"

#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "csaug/errors.h"

namespace csaug {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'C', 'S', 'F', 'B'};
constexpr uint32_t kArchiveVersion = 1;

void check_config(const FrontendConfig& cfg) {
  if (cfg.sample_rate_hz <= 0) throw ConfigError("front-end: non-positive sample rate");
  if (cfg.num_mels < 1) throw ConfigError("front-end: num_mels must be >= 1");
  if (cfg.frame_len_ms <= 0 || cfg.frame_shift_ms <= 0) {
    throw ConfigError("front-end: non-positive frame length or shift");
  }
  if (cfg.frame_shift_ms > cfg.frame_len_ms) {
    throw ConfigError("front-end: frame shift must not exceed frame length");
  }
  if (!(cfg.log_floor > 0)) throw ConfigError("front-end: log_floor must be positive");
}

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 FFT. Sizes here are always powers of two, and a
// fixed butterfly order keeps the output bit-identical across platforms.
void fft(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / double(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular filters on the FFT bin center frequencies, unnormalized,
// spanning 0 Hz .. Nyquist.
std::vector<double> mel_filterbank(int num_mels, int sample_rate, size_t nfft) {
  const size_t nbins = nfft / 2 + 1;
  std::vector<double> edges(size_t(num_mels) + 2);
  const double mel_hi = hz_to_mel(sample_rate / 2.0);
  for (size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_hi * double(i) / double(num_mels + 1));
  }
  std::vector<double> weights(size_t(num_mels) * nbins, 0.0);
  for (int m = 0; m < num_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (size_t k = 0; k < nbins; ++k) {
      const double f = double(k) * sample_rate / double(nfft);
      double w = 0.0;
      if (f > lo && f <= mid && mid > lo) {
        w = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi && hi > mid) {
        w = (hi - f) / (hi - mid);
      }
      weights[size_t(m) * nbins + k] = w;
    }
  }
  return weights;
}

void put_u32le(std::string& s, uint32_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char((v >> 8) & 0xff));
  s.push_back(char((v >> 16) & 0xff));
  s.push_back(char((v >> 24) & 0xff));
}

uint32_t get_u32le(const unsigned char* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}

json config_to_json(const FrontendConfig& cfg) {
  json j;
  j["sample_rate_hz"] = cfg.sample_rate_hz;
  j["frame_len_ms"] = cfg.frame_len_ms;
  j["frame_shift_ms"] = cfg.frame_shift_ms;
  j["num_mels"] = cfg.num_mels;
  j["log_floor"] = cfg.log_floor;
  j["window"] = "hann";
  j["fft"] = "radix2-next-pow2";
  j["mel"] = "triangular-0-nyquist";
  return j;
}

FrontendConfig config_from_json(const json& j, const std::string& origin) {
  FrontendConfig cfg;
  try {
    cfg.sample_rate_hz = j.at("sample_rate_hz").get<int>();
    cfg.frame_len_ms = j.at("frame_len_ms").get<double>();
    cfg.frame_shift_ms = j.at("frame_shift_ms").get<double>();
    cfg.num_mels = j.at("num_mels").get<int>();
    cfg.log_floor = j.at("log_floor").get<double>();
  } catch (const json::exception& e) {
    throw DataError(origin + ": bad archive metadata: " + e.what());
  }
  return cfg;
}

}  // namespace

int FrontendConfig::window_samples() const {
  return int(std::llround(sample_rate_hz * frame_len_ms / 1000.0));
}

int FrontendConfig::hop_samples() const {
  return int(std::llround(sample_rate_hz * frame_shift_ms / 1000.0));
}

int64_t frame_count(int64_t num_samples, int window_samples, int hop_samples) {
  if (num_samples < window_samples) return 0;
  return (num_samples - window_samples) / hop_samples + 1;
}

FeatureMatrix extract_logmel(std::span<const float> samples, const FrontendConfig& cfg) {
  check_config(cfg);
  const int window = cfg.window_samples();
  const int hop = cfg.hop_samples();
  if (window <= 0 || hop <= 0) throw ConfigError("front-end: degenerate window or hop");

  const int64_t frames = frame_count(int64_t(samples.size()), window, hop);
  FeatureMatrix out;
  out.num_frames = frames;
  out.num_bins = cfg.num_mels;
  out.data.resize(size_t(frames) * cfg.num_mels);
  if (frames == 0) return out;

  const size_t nfft = next_pow2(size_t(window));
  const size_t nbins = nfft / 2 + 1;

  // Periodic Hann.
  std::vector<double> hann(static_cast<size_t>(window), 0.0);
  for (int n = 0; n < window; ++n) {
    hann[size_t(n)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / double(window));
  }
  const std::vector<double> mel = mel_filterbank(cfg.num_mels, cfg.sample_rate_hz, nfft);

  std::vector<std::complex<double>> buf(nfft);
  std::vector<double> power(nbins);
  for (int64_t t = 0; t < frames; ++t) {
    const size_t start = size_t(t) * hop;
    for (int n = 0; n < window; ++n) {
      buf[size_t(n)] = std::complex<double>(double(samples[start + n]) * hann[size_t(n)], 0.0);
    }
    std::fill(buf.begin() + window, buf.end(), std::complex<double>(0.0, 0.0));
    fft(buf);
    for (size_t k = 0; k < nbins; ++k) power[k] = std::norm(buf[k]);
    for (int m = 0; m < cfg.num_mels; ++m) {
      double e = 0.0;
      const double* w = &mel[size_t(m) * nbins];
      for (size_t k = 0; k < nbins; ++k) e += w[k] * power[k];
      out.at(t, m) = float(std::log(std::max(e, cfg.log_floor)));
    }
  }
  return out;
}

FeatureMatrix concat_features(const std::vector<FeatureMatrix>& parts) {
  FeatureMatrix out;
  out.num_bins = parts.empty() ? 40 : parts.front().num_bins;
  for (const auto& p : parts) {
    if (p.num_bins != out.num_bins) {
      throw DataError("concat_features: bin-count mismatch (" +
                      std::to_string(p.num_bins) + " vs " +
                      std::to_string(out.num_bins) + ")");
    }
    out.num_frames += p.num_frames;
  }
  out.data.reserve(size_t(out.num_frames) * out.num_bins);
  for (const auto& p : parts) out.data.insert(out.data.end(), p.data.begin(), p.data.end());
  return out;
}

std::string archive_to_bytes(const FeatureMatrix& m, const FrontendConfig& cfg) {
  std::string bytes;
  const std::string meta = config_to_json(cfg).dump();
  bytes.reserve(16 + m.data.size() * 4 + 4 + meta.size());
  bytes.append(kMagic, 4);
  put_u32le(bytes, kArchiveVersion);
  put_u32le(bytes, uint32_t(m.num_frames));
  put_u32le(bytes, uint32_t(m.num_bins));
  for (float f : m.data) put_u32le(bytes, std::bit_cast<uint32_t>(f));
  put_u32le(bytes, uint32_t(meta.size()));
  bytes += meta;
  return bytes;
}

FeatureMatrix archive_from_bytes(std::string_view bytes, const std::string& origin,
                                 FrontendConfig* cfg_out) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 16) throw DataError(origin + ": bad magic (file too short)");
  if (std::memcmp(p, kMagic, 4) != 0) throw DataError(origin + ": bad magic");
  const uint32_t version = get_u32le(p + 4);
  if (version != kArchiveVersion) {
    throw DataError(origin + ": unsupported archive version " + std::to_string(version));
  }
  FeatureMatrix m;
  m.num_frames = get_u32le(p + 8);
  m.num_bins = int(get_u32le(p + 12));
  const size_t payload = size_t(m.num_frames) * size_t(m.num_bins) * 4;
  if (bytes.size() < 16 + payload) {
    throw DataError(origin + ": truncated payload: expected " + std::to_string(payload) +
                    " feature bytes (" + std::to_string(m.num_frames) + " frames), got " +
                    std::to_string(bytes.size() - 16));
  }
  m.data.resize(size_t(m.num_frames) * size_t(m.num_bins));
  for (size_t i = 0; i < m.data.size(); ++i) {
    m.data[i] = std::bit_cast<float>(get_u32le(p + 16 + 4 * i));
  }
  size_t pos = 16 + payload;
  if (bytes.size() < pos + 4) throw DataError(origin + ": truncated metadata length");
  const uint32_t meta_len = get_u32le(p + pos);
  pos += 4;
  if (bytes.size() < pos + meta_len) throw DataError(origin + ": truncated metadata");
  if (cfg_out != nullptr) {
    json j = json::parse(bytes.substr(pos, meta_len), nullptr, false);
    if (j.is_discarded()) throw DataError(origin + ": bad archive metadata (not JSON)");
    *cfg_out = config_from_json(j, origin);
  }
  return m;
}

void write_archive(const FeatureMatrix& m, const FrontendConfig& cfg,
                   const std::string& path) {
  const std::string bytes = archive_to_bytes(m, cfg);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open archive for writing: " + path);
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw DataError("failed writing archive: " + path);
}

FeatureMatrix read_archive(const std::string& path, FrontendConfig* cfg_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open archive: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return archive_from_bytes(bytes, path, cfg_out);
}

}  // namespace csaug
