// include/csaug/wav.h

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

#ifndef CSAUG_WAV_H_
#define CSAUG_WAV_H_

#include <span>
#include <string>
#include <vector>

namespace csaug {

struct WavData {
  int sample_rate_hz = 0;
  std::vector<float> samples;  // mono, in [-1, 1)
};

// Reads a RIFF/WAVE file. Only uncompressed 16-bit mono PCM is accepted;
// anything else is a DataError. Chunks other than fmt/data are skipped.
WavData read_wav(const std::string& path);

// Writes 16-bit mono PCM; samples are clamped to [-1, 1).
void write_wav(const std::string& path, int sample_rate_hz,
               std::span<const float> samples);

}  // namespace csaug

#endif  // CSAUG_WAV_H_
