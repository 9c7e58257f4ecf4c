// include/csaug/augment.h

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

#ifndef CSAUG_AUGMENT_H_
#define CSAUG_AUGMENT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csaug/corpus.h"
#include "csaug/rng.h"

namespace csaug {

// Target-length classes for generated code-switched utterances. A generated
// utterance for bucket T must end up with total duration in [T - slack, T].
struct Bucket {
  double target_s = 0.0;
  double fraction = 0.0;
  bool operator==(const Bucket&) const = default;
};

struct BucketPlan {
  std::vector<Bucket> buckets{{5.0, 0.25}, {10.0, 0.25}, {15.0, 0.25},
                              {20.0, 0.125}, {25.0, 0.125}};
  double slack_s = 2.0;

  // fractions sum to 1 +- 1e-9, targets strictly increasing,
  // slack < smallest target.
  void validate() const;
  bool operator==(const BucketPlan&) const = default;
};

// Directed language-pair permission matrix. Encodes the ablation grid:
//   no<L1><L2>  forbid the single transition L1 -> L2
//   no<L1>x     bar L1 from augmentation entirely
//   o<L1>x      every transition must touch L1 (hub)
//   all         no restrictions
struct TransitionPolicy {
  std::string name = "all";
  std::vector<std::string> languages;  // sorted
  std::set<std::pair<std::string, std::string>> forbidden_pairs;
  std::set<std::string> excluded;
  std::optional<std::string> hub;

  bool allows(const std::string& from, const std::string& to) const;
  std::vector<std::pair<std::string, std::string>> allowed_pairs() const;
  void validate() const;
};

TransitionPolicy policy_from_name(const std::string& name,
                                  const std::vector<std::string>& languages);

// Largest-remainder apportionment of fraction*num_cs per bucket; ties on the
// remainder go to the earlier bucket. Counts sum to num_cs exactly.
std::vector<int64_t> plan_buckets(int64_t num_cs, const BucketPlan& plan);

// One synthesized code-switched utterance: ordered source segments whose
// features and labels get concatenated downstream.
struct AugmentedUtterance {
  std::vector<std::string> segment_ids;
  std::vector<std::string> segment_langs;
  double total_duration_s = 0.0;
  std::string text;  // transcripts joined with single spaces
  double bucket_target_s = 0.0;
  bool operator==(const AugmentedUtterance&) const = default;
};

struct AugmentationConfig {
  double cs_fraction = 0.5;  // in (0, 1]
  BucketPlan bucket_plan;
  TransitionPolicy policy;
  uint64_t seed = 0;
  int max_retries = 100;
};

struct Provenance {
  std::string toolkit;
  std::string version;
  std::string rng;
  uint64_t seed = 0;
  std::string policy;
  double cs_fraction = 0.0;
  BucketPlan bucket_plan;
  int max_retries = 100;
  std::string config_hash;  // stamped by the CLI over the effective config
};

struct AugmentedDataset {
  std::vector<AugmentedUtterance> cs_utterances;
  std::vector<std::string> mono_utterances;  // source ids; repeats allowed
  Provenance provenance;
};

// Per-language sampling pools over a manifest, restricted to the policy's
// non-excluded languages. Languages are kept in sorted order and pools in
// manifest order so draws are reproducible.
struct LanguagePools {
  std::vector<std::string> langs;
  std::vector<std::vector<const Utterance*>> pools;

  static LanguagePools from_manifest(const CorpusManifest& manifest,
                                     const TransitionPolicy& policy);
};

// Draws languages and utterances until the total lands in
// [target - slack, target] with at least two segments. A candidate that
// would overshoot the target is redrawn (up to max_retries per extension);
// if an extension step is exhausted the whole sequence restarts, and after
// max_retries restarts the request is reported infeasible.
AugmentedUtterance generate_cs_utterance(const LanguagePools& pools,
                                         const TransitionPolicy& policy,
                                         double target_s, double slack_s, Rng& rng,
                                         int max_retries);

// Assembles the full augmented dataset: round(cs_fraction * N) generated CS
// utterances apportioned across buckets, plus a monolingual portion that
// starts with every source utterance unused by generation and is topped up
// by uniform draws (repeats allowed) to N - num_cs entries. When the
// monolingual portion is zero-sized (cs_fraction == 1) no coverage fill
// happens — that is the artificial-test-set mode.
AugmentedDataset build_augmented_dataset(const CorpusManifest& manifest,
                                         const AugmentationConfig& cfg);

// Same generator at cs_fraction = 1 over the (merged) test manifests.
AugmentedDataset build_artificial_testset(const std::vector<CorpusManifest>& manifests,
                                          AugmentationConfig cfg);

// ---------------------------------------------------------------------------
// Augmented-dataset manifest: corpus line format plus
// {segments, segment_langs, bucket_target_s} and a provenance block in the
// header. Monolingual entries carry their single source segment and a null
// bucket target.

struct AugmentedRecord {
  std::string id;
  std::string lang;
  std::string audio;
  double duration_s = 0.0;
  std::string text;
  std::vector<std::string> segments;
  std::vector<std::string> segment_langs;
  std::optional<double> bucket_target_s;

  bool is_cs() const { return segments.size() >= 2; }
  bool operator==(const AugmentedRecord&) const = default;
};

struct AugmentedManifest {
  std::string source_name;
  std::vector<std::string> languages;
  std::string provenance_json;  // raw header block, round-tripped verbatim
  std::vector<AugmentedRecord> records;
};

// audio_paths (optional) maps output record ids to materialized feature
// archives; entries replace the record's audio field.
std::string augmented_manifest_to_string(
    const AugmentedDataset& dataset, const CorpusManifest& source,
    const std::map<std::string, std::string>* audio_paths = nullptr);
void save_augmented_manifest(const AugmentedDataset& dataset,
                             const CorpusManifest& source, const std::string& path,
                             const std::map<std::string, std::string>* audio_paths = nullptr);
AugmentedManifest load_augmented_manifest(const std::string& path);

// Output record ids in manifest order: mono ids first (as-is), then
// generated ids "cs-000001", "cs-000002", ...
std::string cs_utterance_id(size_t index);

// Post-hoc constraint report over a saved augmented manifest.
struct DatasetStats {
  int64_t total = 0;
  int64_t cs_count = 0;
  int64_t mono_count = 0;
  double cs_fraction = 0.0;
  std::map<double, int64_t> bucket_histogram;
  std::map<std::string, int64_t> transition_counts;     // "de>en" -> count
  std::map<std::string, int64_t> segments_per_language;
  int64_t same_language_adjacencies = 0;
  int64_t duplicate_mono_entries = 0;  // mono ids repeated or already in CS
  std::optional<int64_t> missing_source_ids;  // set when checked vs a source
};

DatasetStats dataset_stats(const AugmentedManifest& manifest,
                           const CorpusManifest* source = nullptr);

}  // namespace csaug

#endif  // CSAUG_AUGMENT_H_
