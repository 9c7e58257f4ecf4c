// tests/test_rng.cc

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

#include "csaug/rng.h"

#include <set>
#include <vector>

#include <doctest.h>

using csaug::Rng;

TEST_CASE("same seed reproduces the stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("splitmix64 reference values") {
  // First outputs for seed 0 of the published splitmix64 algorithm; pins the
  // generator so provenance tags stay meaningful.
  Rng r(0);
  CHECK(r.next_u64() == 0xE220A8397B1DCDAFull);
  CHECK(r.next_u64() == 0x6E789E6AA1B965F4ull);
  CHECK(r.next_u64() == 0x06C45D188009454Full);
}

TEST_CASE("below stays in range and hits every value") {
  Rng r(7);
  std::set<uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    uint64_t v = r.below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("unit is in [0,1)") {
  Rng r(123);
  for (int i = 0; i < 1000; ++i) {
    double u = r.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("derived streams differ per stream and index") {
  std::set<uint64_t> seeds;
  for (uint64_t stream = 0; stream < 4; ++stream) {
    for (uint64_t index = 0; index < 64; ++index) {
      seeds.insert(Rng::derive(99, stream, index));
    }
  }
  CHECK(seeds.size() == 4 * 64);
}
