// tests/test_features.cc

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

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "csaug/errors.h"
#include "csaug/rng.h"
#include "csaug/wav.h"
#include "test_util.h"

using namespace csaug;

namespace {

// Brute-force frame enumeration: count window placements that fit entirely.
int64_t frames_by_enumeration(int64_t n, int window, int hop) {
  int64_t frames = 0;
  for (int64_t start = 0; start + window <= n; start += hop) ++frames;
  return frames;
}

std::vector<float> sine(int sample_rate, double freq_hz, double seconds) {
  auto n = size_t(std::llround(sample_rate * seconds));
  std::vector<float> s(n);
  for (size_t i = 0; i < n; ++i) {
    s[i] = float(0.4 * std::sin(2.0 * std::numbers::pi * freq_hz * double(i) / sample_rate));
  }
  return s;
}

FeatureMatrix random_matrix(Rng& rng, int64_t frames, int bins) {
  FeatureMatrix m;
  m.num_frames = frames;
  m.num_bins = bins;
  m.data.resize(size_t(frames) * size_t(bins));
  for (auto& f : m.data) f = float(rng.unit() * 40.0 - 20.0);
  return m;
}

}  // namespace

TEST_CASE("one second at 16 kHz gives 66 frames of 40 bins") {
  FrontendConfig cfg;
  std::vector<float> samples = sine(16000, 440.0, 1.0);
  FeatureMatrix m = extract_logmel(samples, cfg);
  CHECK(m.num_frames == 66);
  CHECK(m.num_bins == 40);
  for (float v : m.data) CHECK(std::isfinite(v));
}

TEST_CASE("inputs shorter than one window give zero frames") {
  FrontendConfig cfg;
  std::vector<float> samples(320, 0.1f);  // 0.02 s < 25 ms window
  FeatureMatrix m = extract_logmel(samples, cfg);
  CHECK(m.num_frames == 0);
  CHECK(m.num_bins == 40);
  CHECK(m.data.empty());
}

TEST_CASE("all-zero signal floors every cell at log(log_floor)") {
  FrontendConfig cfg;
  std::vector<float> samples(16000, 0.0f);
  FeatureMatrix m = extract_logmel(samples, cfg);
  const float expected = float(std::log(cfg.log_floor));
  for (float v : m.data) CHECK(v == expected);
}

TEST_CASE("frame-count formula matches brute-force enumeration") {
  FrontendConfig cfg;
  const int window = cfg.window_samples();
  const int hop = cfg.hop_samples();
  CHECK(window == 400);
  CHECK(hop == 240);
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    auto n = int64_t(rng.below(uint64_t(10 * cfg.sample_rate_hz + 1)));
    CHECK(frame_count(n, window, hop) == frames_by_enumeration(n, window, hop));
  }
}

TEST_CASE("fft agrees with a naive dft") {
  // extract_logmel's spectra are only as good as the transform; check one
  // window worth against the O(n^2) definition.
  FrontendConfig cfg;
  Rng rng(5);
  std::vector<float> samples(400);
  for (auto& s : samples) s = float(rng.unit() - 0.5);
  FeatureMatrix fast = extract_logmel(samples, cfg);
  REQUIRE(fast.num_frames == 1);

  // Rebuild the single frame by definition: window, zero-pad to 512, DFT,
  // power, mel weights recomputed here independently.
  const size_t nfft = 512;
  std::vector<std::complex<double>> x(nfft, 0.0);
  for (size_t n = 0; n < 400; ++n) {
    double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(n) / 400.0);
    x[n] = samples[n] * w;
  }
  std::vector<double> power(nfft / 2 + 1, 0.0);
  for (size_t k = 0; k <= nfft / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (size_t n = 0; n < nfft; ++n) {
      double ang = -2.0 * std::numbers::pi * double(k) * double(n) / double(nfft);
      acc += x[n] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    power[k] = std::norm(acc);
  }
  auto hz_to_mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto mel_to_hz = [](double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); };
  std::vector<double> edges(42);
  for (size_t i = 0; i < 42; ++i) {
    edges[i] = mel_to_hz(hz_to_mel(8000.0) * double(i) / 41.0);
  }
  for (int m = 0; m < 40; ++m) {
    double e = 0.0;
    for (size_t k = 0; k <= nfft / 2; ++k) {
      double f = double(k) * 16000.0 / double(nfft);
      double w = 0.0;
      if (f > edges[m] && f <= edges[m + 1]) {
        w = (f - edges[m]) / (edges[m + 1] - edges[m]);
      } else if (f > edges[m + 1] && f < edges[m + 2]) {
        w = (edges[m + 2] - f) / (edges[m + 2] - edges[m + 1]);
      }
      e += w * power[k];
    }
    double expected = std::log(std::max(e, 1e-10));
    // the matrix stores float32, so agreement is limited by its precision
    CHECK(fast.at(0, m) == doctest::Approx(expected).epsilon(1e-5));
  }
}

TEST_CASE("a tone lands in the right mel region") {
  FrontendConfig cfg;
  FeatureMatrix low = extract_logmel(sine(16000, 200.0, 0.5), cfg);
  FeatureMatrix high = extract_logmel(sine(16000, 6000.0, 0.5), cfg);
  auto argmax_bin = [](const FeatureMatrix& m) {
    int best = 0;
    for (int b = 1; b < m.num_bins; ++b) {
      if (m.at(0, b) > m.at(0, best)) best = b;
    }
    return best;
  };
  CHECK(argmax_bin(low) < argmax_bin(high));
}

TEST_CASE("concat adds frames in order") {
  FrontendConfig cfg;
  FeatureMatrix a = extract_logmel(sine(16000, 440.0, 1.0), cfg);
  FeatureMatrix b = extract_logmel(sine(16000, 880.0, 1.0), cfg);
  FeatureMatrix ab = concat_features({a, b});
  CHECK(ab.num_frames == 132);
  for (int64_t t = 0; t < a.num_frames; ++t) {
    for (int k = 0; k < 40; ++k) CHECK(ab.at(t, k) == a.at(t, k));
  }
  for (int64_t t = 0; t < b.num_frames; ++t) {
    for (int k = 0; k < 40; ++k) CHECK(ab.at(a.num_frames + t, k) == b.at(t, k));
  }
}

TEST_CASE("concat identity, empty list, associativity, mismatch") {
  Rng rng(3);
  FeatureMatrix a = random_matrix(rng, 4, 40);
  FeatureMatrix b = random_matrix(rng, 7, 40);
  FeatureMatrix c = random_matrix(rng, 1, 40);

  CHECK(concat_features({a}) == a);

  FeatureMatrix empty = concat_features({});
  CHECK(empty.num_frames == 0);
  CHECK(empty.num_bins == 40);
  CHECK(concat_features({empty, a}) == a);

  CHECK(concat_features({concat_features({a, b}), c}) ==
        concat_features({a, concat_features({b, c})}));

  FeatureMatrix wrong = random_matrix(rng, 2, 39);
  CHECK_THROWS_AS(concat_features({a, wrong}), DataError);
}

TEST_CASE("archive round-trip is bit-exact and re-writes identical bytes") {
  test::TempDir tmp("features-archive");
  FrontendConfig cfg;
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    FeatureMatrix m = random_matrix(rng, int64_t(rng.below(50)), 40);
    const std::string path = tmp.path("m.csfb");
    write_archive(m, cfg, path);
    FrontendConfig cfg_back;
    FeatureMatrix back = read_archive(path, &cfg_back);
    CHECK(back == m);
    CHECK(cfg_back == cfg);

    const std::string once = test::read_file(path);
    write_archive(back, cfg_back, path);
    CHECK(test::read_file(path) == once);
  }
}

TEST_CASE("archive error paths") {
  test::TempDir tmp("features-archive-err");
  FrontendConfig cfg;
  Rng rng(23);
  FeatureMatrix m = random_matrix(rng, 66, 40);
  const std::string path = tmp.path("m.csfb");
  write_archive(m, cfg, path);

  SUBCASE("bad magic") {
    std::string bytes = test::read_file(path);
    bytes[0] = 'X';
    test::write_file(path, bytes);
    CHECK_THROWS_WITH_AS(read_archive(path), doctest::Contains("bad magic"), DataError);
  }
  SUBCASE("version mismatch") {
    std::string bytes = test::read_file(path);
    bytes[4] = 9;
    test::write_file(path, bytes);
    CHECK_THROWS_WITH_AS(read_archive(path), doctest::Contains("version"), DataError);
  }
  SUBCASE("truncated payload names expected and actual sizes") {
    // Keep the header's 66 frames but drop the last frame's bytes.
    std::string bytes = test::read_file(path);
    bytes.resize(16 + size_t(65) * 40 * 4);
    test::write_file(path, bytes);
    try {
      read_archive(path);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find(std::to_string(66 * 40 * 4)) != std::string::npos);
      CHECK(msg.find(std::to_string(65 * 40 * 4)) != std::string::npos);
    }
  }
}

TEST_CASE("rejects degenerate configs") {
  std::vector<float> samples(1000, 0.1f);
  FrontendConfig bad;
  bad.sample_rate_hz = 0;
  CHECK_THROWS_AS(extract_logmel(samples, bad), ConfigError);

  FrontendConfig shift;
  shift.frame_shift_ms = 30.0;  // > frame_len_ms
  CHECK_THROWS_AS(extract_logmel(samples, shift), ConfigError);

  FrontendConfig floor0;
  floor0.log_floor = 0.0;
  CHECK_THROWS_AS(extract_logmel(samples, floor0), ConfigError);
}

TEST_CASE("wav round-trip and format rejection") {
  test::TempDir tmp("wav");
  std::vector<float> samples = sine(16000, 440.0, 0.25);
  write_wav(tmp.path("a.wav"), 16000, samples);
  WavData back = read_wav(tmp.path("a.wav"));
  CHECK(back.sample_rate_hz == 16000);
  REQUIRE(back.samples.size() == samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    CHECK(back.samples[i] == doctest::Approx(samples[i]).epsilon(1e-3));
  }

  test::write_file(tmp.path("b.wav"), "not a wav at all");
  CHECK_THROWS_AS(read_wav(tmp.path("b.wav")), DataError);
}
