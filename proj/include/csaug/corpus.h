// include/csaug/corpus.h

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

#ifndef CSAUG_CORPUS_H_
#define CSAUG_CORPUS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace csaug {

// One monolingual recording. `duration_s` is authoritative metadata and is
// never recomputed from audio at load time.
struct Utterance {
  std::string id;
  std::string lang;
  std::string audio;
  double duration_s = 0.0;
  std::string text;

  bool operator==(const Utterance&) const = default;
};

// A validated set of utterances plus the declared language inventory.
// Immutable after load; safe to share across threads.
struct CorpusManifest {
  std::string source_name;
  std::vector<std::string> languages;  // sorted, unique
  std::vector<Utterance> utterances;

  double total_duration_s() const;
  bool operator==(const CorpusManifest&) const = default;
};

struct LanguageStats {
  int64_t utterance_count = 0;
  double total_duration_s = 0.0;
  double duration_fraction = 0.0;
};

// Manifest file layout: UTF-8 JSON lines. Line 1 is a header object
// {"languages": [...], "source_name": "..."}; every following non-blank line
// is a record with exactly the fields {id, lang, audio, duration_s, text}.
// Unknown fields are rejected. A completely empty file is the empty manifest.
CorpusManifest load_manifest(const std::string& path);
CorpusManifest parse_manifest(std::istream& in, const std::string& origin);

void save_manifest(const CorpusManifest& m, const std::string& path);
std::string manifest_to_string(const CorpusManifest& m);

// Union of manifests. Every id is prefixed "<source_name>/" so provenance
// stays recoverable; a collision after prefixing is an error.
CorpusManifest merge_manifests(const std::vector<CorpusManifest>& manifests);

// Per-language counts, durations, and duration fractions. Fractions sum to 1
// within 1e-9 on non-empty manifests.
std::map<std::string, LanguageStats> composition_stats(const CorpusManifest& m);

// Throws DataError if any manifest invariant is violated.
void validate_manifest(const CorpusManifest& m);

}  // namespace csaug

#endif  // CSAUG_CORPUS_H_
