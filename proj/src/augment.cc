// src/augment.cc

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

#include "csaug/augment.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "csaug/errors.h"
#include "csaug/version.h"

namespace csaug {

using nlohmann::json;

namespace {

// RNG stream tags under one master seed.
constexpr uint64_t kStreamCs = 1;
constexpr uint64_t kStreamMonoTopUp = 2;

bool is_two_letter(const std::string& s) {
  return s.size() == 2 && std::islower(static_cast<unsigned char>(s[0])) &&
         std::islower(static_cast<unsigned char>(s[1]));
}

}  // namespace

std::string cs_utterance_id(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "cs-%06zu", index + 1);
  return buf;
}

void BucketPlan::validate() const {
  if (buckets.empty()) throw ConfigError("bucket plan: no buckets");
  double sum = 0.0;
  double prev = 0.0;
  for (const auto& b : buckets) {
    if (b.target_s <= prev) {
      throw ConfigError("bucket plan: targets must be strictly increasing");
    }
    if (b.fraction < 0.0) throw ConfigError("bucket plan: negative fraction");
    prev = b.target_s;
    sum += b.fraction;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("bucket plan: fractions sum to " + std::to_string(sum) +
                      ", expected 1");
  }
  if (!(slack_s >= 0.0) || slack_s >= buckets.front().target_s) {
    throw ConfigError("bucket plan: slack must be in [0, smallest target)");
  }
}

bool TransitionPolicy::allows(const std::string& from, const std::string& to) const {
  if (from == to) return false;
  if (excluded.count(from) || excluded.count(to)) return false;
  if (forbidden_pairs.count({from, to})) return false;
  if (hub && from != *hub && to != *hub) return false;
  return true;
}

std::vector<std::pair<std::string, std::string>> TransitionPolicy::allowed_pairs() const {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& from : languages) {
    for (const auto& to : languages) {
      if (allows(from, to)) pairs.emplace_back(from, to);
    }
  }
  return pairs;
}

void TransitionPolicy::validate() const {
  std::set<std::string> inventory(languages.begin(), languages.end());
  if (inventory.size() != languages.size()) {
    throw ConfigError("policy: duplicate language codes");
  }
  for (const auto& l : excluded) {
    if (!inventory.count(l)) {
      throw ConfigError("policy: excluded language \"" + l + "\" not in inventory");
    }
  }
  for (const auto& [from, to] : forbidden_pairs) {
    if (!inventory.count(from) || !inventory.count(to)) {
      throw ConfigError("policy: forbidden pair references unknown language");
    }
  }
  if (hub) {
    if (!inventory.count(*hub)) {
      throw ConfigError("policy: hub language \"" + *hub + "\" not in inventory");
    }
    if (excluded.count(*hub)) {
      throw ConfigError("policy: hub language \"" + *hub + "\" is excluded");
    }
  }
  if (allowed_pairs().empty()) {
    throw ConfigError("policy \"" + name + "\": no allowed language transition remains");
  }
}

TransitionPolicy policy_from_name(const std::string& name,
                                  const std::vector<std::string>& languages) {
  TransitionPolicy policy;
  policy.name = name;
  policy.languages = languages;
  std::sort(policy.languages.begin(), policy.languages.end());

  const std::set<std::string> inventory(languages.begin(), languages.end());
  auto check_lang = [&](const std::string& l) {
    if (!inventory.count(l)) {
      throw ConfigError("policy \"" + name + "\": language \"" + l +
                        "\" not in inventory");
    }
    return l;
  };

  if (name == "all") {
    // no restrictions
  } else if (name.size() == 5 && name.starts_with("no") && name.back() == 'x' &&
             is_two_letter(name.substr(2, 2))) {
    policy.excluded.insert(check_lang(name.substr(2, 2)));
  } else if (name.size() == 6 && name.starts_with("no") &&
             is_two_letter(name.substr(2, 2)) && is_two_letter(name.substr(4, 2))) {
    const std::string from = check_lang(name.substr(2, 2));
    const std::string to = check_lang(name.substr(4, 2));
    if (from == to) throw ConfigError("policy \"" + name + "\": self-transition");
    policy.forbidden_pairs.insert({from, to});
  } else if (name.size() == 4 && name.front() == 'o' && name.back() == 'x' &&
             is_two_letter(name.substr(1, 2))) {
    policy.hub = check_lang(name.substr(1, 2));
  } else {
    throw ConfigError("unparseable policy name \"" + name +
                      "\" (expected all | no<L1><L2> | no<L>x | o<L>x)");
  }
  policy.validate();
  return policy;
}

std::vector<int64_t> plan_buckets(int64_t num_cs, const BucketPlan& plan) {
  plan.validate();
  if (num_cs < 0) throw ConfigError("plan_buckets: negative count");
  const size_t k = plan.buckets.size();
  std::vector<int64_t> counts(k, 0);
  std::vector<double> remainders(k, 0.0);
  int64_t assigned = 0;
  for (size_t i = 0; i < k; ++i) {
    const double quota = plan.buckets[i].fraction * double(num_cs);
    counts[i] = int64_t(std::floor(quota));
    remainders[i] = quota - double(counts[i]);
    assigned += counts[i];
  }
  int64_t left = num_cs - assigned;
  std::vector<size_t> order(k);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
    return a < b;  // equal remainders: earlier bucket wins
  });
  for (size_t i = 0; left > 0 && i < k; ++i, --left) counts[order[i]] += 1;
  return counts;
}

LanguagePools LanguagePools::from_manifest(const CorpusManifest& manifest,
                                           const TransitionPolicy& policy) {
  LanguagePools lp;
  std::set<std::string> participating;
  for (const auto& l : policy.languages) {
    if (!policy.excluded.count(l)) participating.insert(l);
  }
  std::map<std::string, std::vector<const Utterance*>> by_lang;
  for (const auto& u : manifest.utterances) {
    if (participating.count(u.lang)) by_lang[u.lang].push_back(&u);
  }
  for (auto& [lang, pool] : by_lang) {
    lp.langs.push_back(lang);
    lp.pools.push_back(std::move(pool));
  }
  return lp;
}

AugmentedUtterance generate_cs_utterance(const LanguagePools& pools,
                                         const TransitionPolicy& policy,
                                         double target_s, double slack_s, Rng& rng,
                                         int max_retries) {
  const size_t n_langs = pools.langs.size();

  // successors[i]: languages reachable from i under the policy, non-empty
  // pools only.
  std::vector<std::vector<size_t>> successors(n_langs);
  for (size_t i = 0; i < n_langs; ++i) {
    for (size_t j = 0; j < n_langs; ++j) {
      if (i == j || pools.pools[j].empty()) continue;
      if (policy.allows(pools.langs[i], pools.langs[j])) successors[i].push_back(j);
    }
  }
  // The opening segment may come from any non-excluded language that can
  // transition somewhere; under a hub policy the constraint binds
  // transitions, not the first pick.
  std::vector<size_t> starters;
  for (size_t i = 0; i < n_langs; ++i) {
    if (!pools.pools[i].empty() && !successors[i].empty()) starters.push_back(i);
  }
  if (starters.empty()) {
    throw InfeasibleError("generate: policy \"" + policy.name +
                          "\" leaves no language eligible to start a sequence");
  }

  std::vector<const Utterance*> segments;
  for (int restart = 0; restart <= max_retries; ++restart) {
    segments.clear();
    double total = 0.0;
    size_t cur = 0;
    bool dead_end = false;
    int attempts = 0;
    for (;;) {
      if (segments.size() >= 2 && total >= target_s - slack_s) {
        AugmentedUtterance out;
        out.bucket_target_s = target_s;
        out.total_duration_s = total;
        for (const Utterance* u : segments) {
          out.segment_ids.push_back(u->id);
          out.segment_langs.push_back(u->lang);
          if (!out.text.empty()) out.text += ' ';
          out.text += u->text;
        }
        return out;
      }
      size_t next;
      if (segments.empty()) {
        next = starters[rng.below(starters.size())];
      } else {
        const auto& succ = successors[cur];
        if (succ.empty()) {
          dead_end = true;
          break;
        }
        next = succ[rng.below(succ.size())];
      }
      const auto& pool = pools.pools[next];
      const Utterance* u = pool[rng.below(pool.size())];
      if (total + u->duration_s > target_s) {
        if (++attempts > max_retries) break;  // restart the whole sequence
        continue;
      }
      segments.push_back(u);
      total += u->duration_s;
      cur = next;
      attempts = 0;
    }
    (void)dead_end;
  }
  throw InfeasibleError("generate: no sequence fits [" +
                        std::to_string(target_s - slack_s) + ", " +
                        std::to_string(target_s) + "] s after " +
                        std::to_string(max_retries) + " restarts (policy \"" +
                        policy.name + "\")");
}

AugmentedDataset build_augmented_dataset(const CorpusManifest& manifest,
                                         const AugmentationConfig& cfg) {
  if (manifest.utterances.empty()) {
    throw DataError("augment: empty manifest");
  }
  if (!(cfg.cs_fraction > 0.0) || cfg.cs_fraction > 1.0) {
    throw ConfigError("augment: cs_fraction must be in (0, 1]");
  }
  cfg.bucket_plan.validate();
  cfg.policy.validate();

  const int64_t n = int64_t(manifest.utterances.size());
  const auto num_cs = int64_t(std::floor(cfg.cs_fraction * double(n) + 0.5));
  const int64_t num_mono_target = n - num_cs;

  AugmentedDataset out;
  out.provenance.toolkit = kToolkitName;
  out.provenance.version = kToolkitVersion;
  out.provenance.rng = kRngAlgorithm;
  out.provenance.seed = cfg.seed;
  out.provenance.policy = cfg.policy.name;
  out.provenance.cs_fraction = cfg.cs_fraction;
  out.provenance.bucket_plan = cfg.bucket_plan;
  out.provenance.max_retries = cfg.max_retries;

  std::unordered_set<std::string> used;
  if (num_cs > 0) {
    const LanguagePools pools = LanguagePools::from_manifest(manifest, cfg.policy);
    size_t usable = 0;
    for (const auto& p : pools.pools) usable += p.empty() ? 0 : 1;
    if (usable < 2) {
      throw InfeasibleError("augment: need utterances in at least two non-excluded "
                            "languages, found " + std::to_string(usable));
    }
    const std::vector<int64_t> bucket_counts = plan_buckets(num_cs, cfg.bucket_plan);
    out.cs_utterances.reserve(size_t(num_cs));
    size_t index = 0;
    for (size_t b = 0; b < bucket_counts.size(); ++b) {
      for (int64_t k = 0; k < bucket_counts[b]; ++k, ++index) {
        Rng rng(Rng::derive(cfg.seed, kStreamCs, index));
        out.cs_utterances.push_back(
            generate_cs_utterance(pools, cfg.policy, cfg.bucket_plan.buckets[b].target_s,
                                  cfg.bucket_plan.slack_s, rng, cfg.max_retries));
      }
    }
    for (const auto& cs : out.cs_utterances) {
      used.insert(cs.segment_ids.begin(), cs.segment_ids.end());
    }
  }

  // Coverage first: every utterance generation never touched goes into the
  // monolingual portion, even when that overshoots the proportional size.
  // A zero-sized monolingual portion (cs_fraction == 1) skips the fill; that
  // is the test-set mode and coverage is deliberately not guaranteed there.
  if (num_mono_target > 0) {
    for (const auto& u : manifest.utterances) {
      if (!used.count(u.id)) out.mono_utterances.push_back(u.id);
    }
    if (int64_t(out.mono_utterances.size()) < num_mono_target) {
      Rng rng(Rng::derive(cfg.seed, kStreamMonoTopUp, 0));
      while (int64_t(out.mono_utterances.size()) < num_mono_target) {
        const auto& u = manifest.utterances[size_t(rng.below(uint64_t(n)))];
        out.mono_utterances.push_back(u.id);
      }
    }
  }
  return out;
}

AugmentedDataset build_artificial_testset(const std::vector<CorpusManifest>& manifests,
                                          AugmentationConfig cfg) {
  if (manifests.empty()) throw DataError("testset: no manifests given");
  cfg.cs_fraction = 1.0;
  if (manifests.size() == 1) return build_augmented_dataset(manifests.front(), cfg);
  return build_augmented_dataset(merge_manifests(manifests), cfg);
}

// --------------------------------------------------------------------------
// Augmented manifest IO

namespace {

json provenance_to_json(const Provenance& p) {
  json j;
  j["toolkit"] = p.toolkit;
  j["version"] = p.version;
  j["rng"] = p.rng;
  j["seed"] = p.seed;
  j["policy"] = p.policy;
  j["cs_fraction"] = p.cs_fraction;
  json buckets = json::array();
  for (const auto& b : p.bucket_plan.buckets) {
    buckets.push_back({{"target_s", b.target_s}, {"fraction", b.fraction}});
  }
  j["buckets"] = buckets;
  j["slack_s"] = p.bucket_plan.slack_s;
  j["max_retries"] = p.max_retries;
  j["config_hash"] = p.config_hash;
  return j;
}

std::string join_langs(const std::vector<std::string>& langs) {
  std::string out;
  for (const auto& l : langs) {
    if (!out.empty()) out += '-';
    out += l;
  }
  return out;
}

}  // namespace

std::string augmented_manifest_to_string(
    const AugmentedDataset& dataset, const CorpusManifest& source,
    const std::map<std::string, std::string>* audio_paths) {
  std::unordered_map<std::string, const Utterance*> by_id;
  by_id.reserve(source.utterances.size());
  for (const auto& u : source.utterances) by_id[u.id] = &u;
  auto lookup = [&](const std::string& id) -> const Utterance& {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw DataError("augmented dataset references unknown source id \"" + id + "\"");
    }
    return *it->second;
  };
  auto audio_for = [&](const std::string& record_id, const std::string& fallback) {
    if (audio_paths != nullptr) {
      auto it = audio_paths->find(record_id);
      if (it != audio_paths->end()) return it->second;
    }
    return fallback;
  };

  std::string out;
  {
    json h;
    h["languages"] = source.languages;
    h["source_name"] = source.source_name;
    h["provenance"] = provenance_to_json(dataset.provenance);
    out += h.dump();
    out += "\n";
  }
  auto dump_record = [&out](const AugmentedRecord& r) {
    json j;
    j["id"] = r.id;
    j["lang"] = r.lang;
    j["audio"] = r.audio;
    j["duration_s"] = r.duration_s;
    j["text"] = r.text;
    j["segments"] = r.segments;
    j["segment_langs"] = r.segment_langs;
    if (r.bucket_target_s) {
      j["bucket_target_s"] = *r.bucket_target_s;
    } else {
      j["bucket_target_s"] = nullptr;
    }
    out += j.dump();
    out += "\n";
  };

  for (const auto& id : dataset.mono_utterances) {
    const Utterance& u = lookup(id);
    AugmentedRecord r;
    r.id = u.id;
    r.lang = u.lang;
    r.audio = audio_for(u.id, u.audio);
    r.duration_s = u.duration_s;
    r.text = u.text;
    r.segments = {u.id};
    r.segment_langs = {u.lang};
    dump_record(r);
  }
  for (size_t i = 0; i < dataset.cs_utterances.size(); ++i) {
    const auto& cs = dataset.cs_utterances[i];
    AugmentedRecord r;
    r.id = cs_utterance_id(i);
    r.lang = join_langs(cs.segment_langs);
    r.audio = audio_for(r.id, "");
    r.duration_s = cs.total_duration_s;
    r.text = cs.text;
    r.segments = cs.segment_ids;
    r.segment_langs = cs.segment_langs;
    r.bucket_target_s = cs.bucket_target_s;
    dump_record(r);
  }
  return out;
}

void save_augmented_manifest(const AugmentedDataset& dataset,
                             const CorpusManifest& source, const std::string& path,
                             const std::map<std::string, std::string>* audio_paths) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open augmented manifest for writing: " + path);
  out << augmented_manifest_to_string(dataset, source, audio_paths);
  if (!out) throw DataError("failed writing augmented manifest: " + path);
}

AugmentedManifest load_augmented_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open augmented manifest: " + path);

  AugmentedManifest m;
  std::string line;
  size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed record");
    }
    if (!have_header) {
      try {
        m.source_name = j.at("source_name").get<std::string>();
        m.languages = j.at("languages").get<std::vector<std::string>>();
        m.provenance_json = j.at("provenance").dump();
      } catch (const json::exception& e) {
        throw DataError(path + ":" + std::to_string(line_no) + ": bad header: " + e.what());
      }
      have_header = true;
      continue;
    }
    AugmentedRecord r;
    try {
      r.id = j.at("id").get<std::string>();
      r.lang = j.at("lang").get<std::string>();
      r.audio = j.at("audio").get<std::string>();
      r.duration_s = j.at("duration_s").get<double>();
      r.text = j.at("text").get<std::string>();
      r.segments = j.at("segments").get<std::vector<std::string>>();
      r.segment_langs = j.at("segment_langs").get<std::vector<std::string>>();
      if (!j.at("bucket_target_s").is_null()) {
        r.bucket_target_s = j.at("bucket_target_s").get<double>();
      }
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad record: " + e.what());
    }
    if (r.segments.empty() || r.segments.size() != r.segment_langs.size()) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": segments and segment_langs must be non-empty and match");
    }
    m.records.push_back(std::move(r));
  }
  if (!have_header) throw DataError(path + ": missing header line");
  return m;
}

DatasetStats dataset_stats(const AugmentedManifest& manifest, const CorpusManifest* source) {
  DatasetStats stats;
  std::unordered_map<std::string, int64_t> mono_seen;
  std::unordered_set<std::string> cs_used;

  for (const auto& r : manifest.records) {
    stats.total += 1;
    for (const auto& l : r.segment_langs) stats.segments_per_language[l] += 1;
    if (r.is_cs()) {
      stats.cs_count += 1;
      if (r.bucket_target_s) stats.bucket_histogram[*r.bucket_target_s] += 1;
      for (size_t i = 0; i + 1 < r.segment_langs.size(); ++i) {
        stats.transition_counts[r.segment_langs[i] + ">" + r.segment_langs[i + 1]] += 1;
        if (r.segment_langs[i] == r.segment_langs[i + 1]) {
          stats.same_language_adjacencies += 1;
        }
      }
      cs_used.insert(r.segments.begin(), r.segments.end());
    } else {
      stats.mono_count += 1;
      mono_seen[r.segments.front()] += 1;
    }
  }
  stats.cs_fraction =
      stats.total > 0 ? double(stats.cs_count) / double(stats.total) : 0.0;
  for (const auto& [id, count] : mono_seen) {
    if (count > 1) stats.duplicate_mono_entries += count - 1;
    if (cs_used.count(id)) stats.duplicate_mono_entries += 1;
  }
  if (source != nullptr) {
    int64_t missing = 0;
    for (const auto& u : source->utterances) {
      if (!cs_used.count(u.id) && !mono_seen.count(u.id)) ++missing;
    }
    stats.missing_source_ids = missing;
  }
  return stats;
}

}  // namespace csaug
