// tests/test_corpus.cc

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

#include "csaug/corpus.h"

#include <cmath>
#include <sstream>
#include <string>

#include <doctest.h>

#include "csaug/errors.h"
#include "csaug/rng.h"
#include "test_util.h"

using namespace csaug;

namespace {

CorpusManifest small_manifest() {
  CorpusManifest m;
  m.source_name = "toy";
  m.languages = {"de", "en"};
  m.utterances = {
      {"u1", "de", "a.wav", 3.0, "guten morgen"},
      {"u2", "de", "b.wav", 3.0, "wie geht es dir"},
      {"u3", "en", "c.wav", 3.0, "good morning"},
  };
  return m;
}

}  // namespace

TEST_CASE("load a valid three-record manifest") {
  test::TempDir tmp("corpus-load");
  test::write_file(tmp.path("m.jsonl"),
                   R"({"languages":["de","en"],"source_name":"toy"})"
                   "\n"
                   R"({"id":"u1","lang":"de","audio":"a.wav","duration_s":3.0,"text":"guten morgen"})"
                   "\n"
                   R"({"id":"u2","lang":"de","audio":"b.wav","duration_s":3.0,"text":"wie geht es dir"})"
                   "\n"
                   R"({"id":"u3","lang":"en","audio":"c.wav","duration_s":3.0,"text":"good morning"})"
                   "\n");
  CorpusManifest m = load_manifest(tmp.path("m.jsonl"));
  CHECK(m.utterances.size() == 3);
  CHECK(m.languages == std::vector<std::string>{"de", "en"});
  CHECK(m.source_name == "toy");
  CHECK(m.utterances[1].text == "wie geht es dir");
}

TEST_CASE("duplicate id error names the id and the line") {
  std::istringstream in(
      R"({"languages":["de"],"source_name":"x"})"
      "\n"
      R"({"id":"u1","lang":"de","audio":"","duration_s":1.0,"text":"a"})"
      "\n"
      R"({"id":"u2","lang":"de","audio":"","duration_s":1.0,"text":"b"})"
      "\n"
      R"({"id":"u3","lang":"de","audio":"","duration_s":1.0,"text":"c"})"
      "\n"
      R"({"id":"u1","lang":"de","audio":"","duration_s":1.0,"text":"d"})"
      "\n");
  try {
    parse_manifest(in, "dup.jsonl");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("u1") != std::string::npos);
    CHECK(msg.find(":5") != std::string::npos);
  }
}

TEST_CASE("malformed record reports its line number") {
  std::istringstream in(
      R"({"languages":["de"],"source_name":"x"})"
      "\n{oops\n");
  CHECK_THROWS_WITH_AS(parse_manifest(in, "bad.jsonl"),
                       doctest::Contains("bad.jsonl:2"), DataError);
}

TEST_CASE("unknown fields and unknown languages are rejected") {
  {
    std::istringstream in(
        R"({"languages":["de"],"source_name":"x"})"
        "\n"
        R"({"id":"u1","lang":"de","audio":"","duration_s":1.0,"text":"a","extra":1})"
        "\n");
    CHECK_THROWS_WITH_AS(parse_manifest(in, "m"), doctest::Contains("extra"), DataError);
  }
  {
    std::istringstream in(
        R"({"languages":["de"],"source_name":"x"})"
        "\n"
        R"({"id":"u1","lang":"fr","audio":"","duration_s":1.0,"text":"a"})"
        "\n");
    CHECK_THROWS_WITH_AS(parse_manifest(in, "m"), doctest::Contains("fr"), DataError);
  }
  {
    std::istringstream in(
        R"({"languages":["de"],"source_name":"x"})"
        "\n"
        R"({"id":"u1","lang":"de","audio":"","duration_s":0.0,"text":"a"})"
        "\n");
    CHECK_THROWS_AS(parse_manifest(in, "m"), DataError);
  }
}

TEST_CASE("header-only and fully empty files are the empty manifest") {
  {
    std::istringstream in(R"({"languages":["de","en"],"source_name":"x"})" "\n");
    CorpusManifest m = parse_manifest(in, "m");
    CHECK(m.utterances.empty());
    CHECK(m.languages.size() == 2);
  }
  {
    std::istringstream in("");
    CorpusManifest m = parse_manifest(in, "m");
    CHECK(m.utterances.empty());
    CHECK(m.languages.empty());
    CHECK(m.source_name.empty());
  }
}

TEST_CASE("save/load round-trip is the identity") {
  test::TempDir tmp("corpus-rt");
  CorpusManifest m = small_manifest();
  // Exercise non-ASCII transcripts and exotic durations.
  m.languages.insert(m.languages.begin(), "ar");  // inventory stays sorted
  m.utterances.push_back({"u4", "ar", "d.wav", 2.37251, "\xD9\x85\xD8\xB1\xD8\xAD\xD8\xA8\xD8\xA7"});
  m.utterances.push_back({"u5", "de", "e.wav", 0.001, "z\xC3\xBCring \"quote\"\ttab"});
  save_manifest(m, tmp.path("m.jsonl"));
  CHECK(load_manifest(tmp.path("m.jsonl")) == m);
}

TEST_CASE("round-trip on random manifests") {
  test::TempDir tmp("corpus-rand");
  Rng rng(2024);
  const std::vector<std::string> langs = {"ar", "de", "en"};
  for (int trial = 0; trial < 20; ++trial) {
    CorpusManifest m;
    m.source_name = "rand" + std::to_string(trial);
    m.languages = langs;
    const int n = 1 + int(rng.below(40));
    for (int i = 0; i < n; ++i) {
      Utterance u;
      u.id = "utt-" + std::to_string(i);
      u.lang = langs[rng.below(3)];
      u.audio = "audio/" + std::to_string(i) + ".wav";
      u.duration_s = 0.25 + rng.unit() * 20.0;
      u.text = "w" + std::to_string(rng.below(1000)) + " w" + std::to_string(rng.below(1000));
      m.utterances.push_back(std::move(u));
    }
    save_manifest(m, tmp.path("r.jsonl"));
    CHECK(load_manifest(tmp.path("r.jsonl")) == m);
  }
}

TEST_CASE("merge keeps counts, prefixes ids, unions languages") {
  CorpusManifest a;
  a.source_name = "cv";
  a.languages = {"de"};
  a.utterances = {{"u1", "de", "", 1.0, "eins"}, {"u2", "de", "", 1.0, "zwei"}};
  CorpusManifest b;
  b.source_name = "ted";
  b.languages = {"en"};
  b.utterances = {{"u1", "en", "", 1.0, "one"},
                  {"u2", "en", "", 1.0, "two"},
                  {"u3", "en", "", 1.0, "three"}};

  CorpusManifest merged = merge_manifests({a, b});
  CHECK(merged.utterances.size() == 5);
  CHECK(merged.languages == std::vector<std::string>{"de", "en"});
  CHECK(merged.source_name == "cv+ted");
  CHECK(merged.utterances[0].id == "cv/u1");
  CHECK(merged.utterances[2].id == "ted/u1");
  validate_manifest(merged);
}

TEST_CASE("merge composes: counts are additive, language sets associative") {
  auto mono = [](const std::string& name, const std::string& lang, int count) {
    CorpusManifest m;
    m.source_name = name;
    m.languages = {lang};
    for (int i = 0; i < count; ++i) {
      m.utterances.push_back({"u" + std::to_string(i), lang, "", 1.0, "x"});
    }
    return m;
  };
  CorpusManifest a = mono("a", "de", 3), b = mono("b", "en", 4), c = mono("c", "ar", 5);

  CorpusManifest flat = merge_manifests({a, b, c});
  CorpusManifest left = merge_manifests({merge_manifests({a, b}), c});
  CorpusManifest right = merge_manifests({a, merge_manifests({b, c})});

  for (const CorpusManifest* m : {&flat, &left, &right}) {
    CHECK(m->utterances.size() == 12);
    CHECK(m->languages == std::vector<std::string>{"ar", "de", "en"});
  }
  // Nested merges decorate ids once per level; the flat call is the
  // canonical form.
  CHECK(left.utterances.front().id == "a+b/a/u0");
  CHECK(flat.utterances.front().id == "a/u0");
}

TEST_CASE("merge rejects colliding ids") {
  CorpusManifest a;
  a.source_name = "cv";
  a.languages = {"de"};
  a.utterances = {{"u1", "de", "", 1.0, "eins"}};
  CHECK_THROWS_WITH_AS(merge_manifests({a, a}), doctest::Contains("cv/u1"), DataError);
}

TEST_CASE("merged size matches the sum of three corpus-scale manifests") {
  // 210k + 196k + 375k utterances merge to 781k.
  auto bulk = [](const std::string& name, const std::string& lang, int count) {
    CorpusManifest m;
    m.source_name = name;
    m.languages = {lang};
    m.utterances.reserve(size_t(count));
    for (int i = 0; i < count; ++i) {
      m.utterances.push_back({std::to_string(i), lang, "", 1.0, "x"});
    }
    return m;
  };
  CorpusManifest merged = merge_manifests(
      {bulk("how2", "en", 210000), bulk("cv", "de", 196000), bulk("alj", "ar", 375000)});
  CHECK(merged.utterances.size() == 781000);
}

TEST_CASE("composition stats fractions") {
  CorpusManifest m = small_manifest();
  auto stats = composition_stats(m);
  CHECK(stats.size() == 2);
  CHECK(stats["de"].utterance_count == 2);
  CHECK(stats["de"].duration_fraction == doctest::Approx(0.6667).epsilon(1e-4));
  CHECK(stats["en"].duration_fraction == doctest::Approx(0.3333).epsilon(1e-4));

  double sum = 0.0;
  for (const auto& [lang, s] : stats) sum += s.duration_fraction;
  CHECK(std::abs(sum - 1.0) <= 1e-9);
}

TEST_CASE("composition stats: monolingual and balanced sets") {
  CorpusManifest mono;
  mono.source_name = "m";
  mono.languages = {"ar"};
  mono.utterances = {{"u1", "ar", "", 5.0, "a"}, {"u2", "ar", "", 7.0, "b"}};
  auto s1 = composition_stats(mono);
  CHECK(s1.size() == 1);
  CHECK(s1["ar"].duration_fraction == doctest::Approx(1.0));

  CorpusManifest balanced;
  balanced.source_name = "b";
  balanced.languages = {"ar", "de"};
  balanced.utterances = {{"u1", "de", "", 4.0, "a"}, {"u2", "ar", "", 4.0, "b"}};
  auto s2 = composition_stats(balanced);
  CHECK(s2["de"].duration_fraction == doctest::Approx(0.5));
  CHECK(s2["ar"].duration_fraction == doctest::Approx(0.5));

  CHECK(composition_stats(CorpusManifest{}).empty());
}
