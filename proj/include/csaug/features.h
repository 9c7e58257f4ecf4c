// include/csaug/features.h

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

#ifndef CSAUG_FEATURES_H_
#define CSAUG_FEATURES_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace csaug {

// Log-mel front-end settings. Window/hop are converted to samples with
// rounding; inputs whose sample rate differs from sample_rate_hz are
// rejected upstream (no resampling).
struct FrontendConfig {
  int sample_rate_hz = 16000;
  double frame_len_ms = 25.0;
  double frame_shift_ms = 15.0;
  int num_mels = 40;
  double log_floor = 1e-10;  // applied to mel energies before the log

  int window_samples() const;
  int hop_samples() const;
  bool operator==(const FrontendConfig&) const = default;
};

// frames x bins log-mel energies, row-major float32 so that archive
// round-trips are bit-exact.
struct FeatureMatrix {
  int64_t num_frames = 0;
  int num_bins = 0;
  std::vector<float> data;

  float& at(int64_t frame, int bin) { return data[size_t(frame) * num_bins + bin]; }
  float at(int64_t frame, int bin) const { return data[size_t(frame) * num_bins + bin]; }
  bool operator==(const FeatureMatrix&) const = default;
};

// floor((N - W) / H) + 1 for N >= W, else 0. Tail samples shorter than one
// window are dropped.
int64_t frame_count(int64_t num_samples, int window_samples, int hop_samples);

// Hann window, power spectrum on the next power-of-two FFT, triangular mel
// filters spanning 0..Nyquist, natural log with a floor. All-zero input
// yields log(log_floor) in every cell.
FeatureMatrix extract_logmel(std::span<const float> samples, const FrontendConfig& cfg);

// Row-wise concatenation in order, no gap or overlap. All parts must share
// the bin count; the empty list yields a 0-frame matrix with 40 bins.
FeatureMatrix concat_features(const std::vector<FeatureMatrix>& parts);

// Feature archive, one utterance per file. Layout (all little-endian):
//   "CSFB" | u32 version=1 | u32 num_frames | u32 num_bins |
//   f32 * frames*bins row-major | u32 meta_len | meta (JSON FrontendConfig)
void write_archive(const FeatureMatrix& m, const FrontendConfig& cfg,
                   const std::string& path);
FeatureMatrix read_archive(const std::string& path, FrontendConfig* cfg_out = nullptr);

std::string archive_to_bytes(const FeatureMatrix& m, const FrontendConfig& cfg);
FeatureMatrix archive_from_bytes(std::string_view bytes, const std::string& origin,
                                 FrontendConfig* cfg_out = nullptr);

}  // namespace csaug

#endif  // CSAUG_FEATURES_H_
