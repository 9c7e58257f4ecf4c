// tools/csaug_main.cc

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

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csaug/augment.h"
#include "csaug/bpe.h"
#include "csaug/corpus.h"
#include "csaug/errors.h"
#include "csaug/eval.h"
#include "csaug/features.h"
#include "csaug/rng.h"
#include "csaug/version.h"
#include "csaug/wav.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace csaug;

namespace {

// Exit codes: 0 ok, 1 internal, 2 config, 3 data, 4 infeasible.
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInfeasible = 4;

template <typename... Args>
void log_line(const char* fmt, Args... args) {
  std::fprintf(stderr, "[csaug] ");
  std::fprintf(stderr, fmt, args...);
  std::fprintf(stderr, "\n");
}

// ---------------------------------------------------------------------------
// Pipeline config: one JSON file drives a run; flags override config fields.

struct PipelineConfig {
  std::map<std::string, std::string> manifests;  // label -> path
  FrontendConfig frontend;
  int bpe_vocab_size = 4000;
  double cs_fraction = 0.5;
  std::string policy = "all";
  std::optional<uint64_t> seed;
  int max_retries = 100;
  BucketPlan bucket_plan;
  std::string out_dir = "out";
};

void expect_keys(const json& j, const std::set<std::string>& allowed,
                 const std::string& context) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("config: unknown key \"" + it.key() + "\" in " + context);
    }
  }
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ConfigError("config: " + path + " is not a JSON object");
  }
  expect_keys(j, {"manifests", "frontend", "bpe", "augment", "out_dir"}, "top level");

  PipelineConfig cfg;
  try {
    if (j.contains("manifests")) {
      if (!j["manifests"].is_object()) {
        throw ConfigError("config: manifests must be an object");
      }
      for (auto it = j["manifests"].begin(); it != j["manifests"].end(); ++it) {
        cfg.manifests[it.key()] = it.value().get<std::string>();
      }
    }
    if (j.contains("frontend")) {
      const json& f = j["frontend"];
      expect_keys(f, {"sample_rate_hz", "frame_len_ms", "frame_shift_ms", "num_mels",
                      "log_floor"},
                  "frontend");
      if (f.contains("sample_rate_hz")) cfg.frontend.sample_rate_hz = f["sample_rate_hz"].get<int>();
      if (f.contains("frame_len_ms")) cfg.frontend.frame_len_ms = f["frame_len_ms"].get<double>();
      if (f.contains("frame_shift_ms")) {
        cfg.frontend.frame_shift_ms = f["frame_shift_ms"].get<double>();
      }
      if (f.contains("num_mels")) cfg.frontend.num_mels = f["num_mels"].get<int>();
      if (f.contains("log_floor")) cfg.frontend.log_floor = f["log_floor"].get<double>();
    }
    if (j.contains("bpe")) {
      expect_keys(j["bpe"], {"vocab_size"}, "bpe");
      if (j["bpe"].contains("vocab_size")) cfg.bpe_vocab_size = j["bpe"]["vocab_size"].get<int>();
    }
    if (j.contains("augment")) {
      const json& a = j["augment"];
      expect_keys(a, {"cs_fraction", "policy", "seed", "max_retries", "buckets", "slack_s"},
                  "augment");
      if (a.contains("cs_fraction")) cfg.cs_fraction = a["cs_fraction"].get<double>();
      if (a.contains("policy")) cfg.policy = a["policy"].get<std::string>();
      if (a.contains("seed")) cfg.seed = a["seed"].get<uint64_t>();
      if (a.contains("max_retries")) cfg.max_retries = a["max_retries"].get<int>();
      if (a.contains("slack_s")) cfg.bucket_plan.slack_s = a["slack_s"].get<double>();
      if (a.contains("buckets")) {
        cfg.bucket_plan.buckets.clear();
        for (const auto& b : a["buckets"]) {
          expect_keys(b, {"target_s", "fraction"}, "augment.buckets");
          cfg.bucket_plan.buckets.push_back(
              {b.at("target_s").get<double>(), b.at("fraction").get<double>()});
        }
      }
    }
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return cfg;
}

// Canonical serialization of the effective (post-override) settings; hashed
// into provenance so outputs can be traced back to the exact run recipe.
// Output placement (out_dir) and worker counts do not shape the data and
// stay out of the hash.
json effective_config_json(const PipelineConfig& cfg) {
  json manifests = json::object();
  for (const auto& [label, path] : cfg.manifests) manifests[label] = path;
  json buckets = json::array();
  for (const auto& b : cfg.bucket_plan.buckets) {
    buckets.push_back({{"target_s", b.target_s}, {"fraction", b.fraction}});
  }
  json j;
  j["manifests"] = manifests;
  j["frontend"] = {{"sample_rate_hz", cfg.frontend.sample_rate_hz},
                   {"frame_len_ms", cfg.frontend.frame_len_ms},
                   {"frame_shift_ms", cfg.frontend.frame_shift_ms},
                   {"num_mels", cfg.frontend.num_mels},
                   {"log_floor", cfg.frontend.log_floor}};
  j["bpe"] = {{"vocab_size", cfg.bpe_vocab_size}};
  j["augment"] = {{"cs_fraction", cfg.cs_fraction},
                  {"policy", cfg.policy},
                  {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
                  {"max_retries", cfg.max_retries},
                  {"buckets", buckets},
                  {"slack_s", cfg.bucket_plan.slack_s}};
  return j;
}

std::string fnv1a_hex(const std::string& bytes) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const PipelineConfig& cfg) {
  return fnv1a_hex(effective_config_json(cfg).dump());
}

uint64_t require_seed(const PipelineConfig& cfg) {
  if (!cfg.seed) {
    throw ConfigError("no seed given: set augment.seed in the config or pass --seed "
                      "(runs never draw implicit entropy)");
  }
  return *cfg.seed;
}

// Loads every configured manifest (label order) and merges when there is
// more than one, so ids line up across the features/bpe/augment commands.
CorpusManifest load_input_manifest(const PipelineConfig& cfg) {
  if (cfg.manifests.empty()) throw ConfigError("config: no manifests given");
  std::vector<CorpusManifest> all;
  for (const auto& [label, path] : cfg.manifests) {
    if (!fs::exists(path)) {
      throw ConfigError("config: manifest path does not exist: " + path);
    }
    all.push_back(load_manifest(path));
  }
  if (all.size() == 1) return std::move(all.front());
  return merge_manifests(all);
}

std::string sanitize_filename(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
                    c == '_';
    out += ok ? c : '_';
  }
  return out;
}

// ---------------------------------------------------------------------------
// features: per-utterance log-mel archives plus an id -> path index.

struct FeatureJob {
  const Utterance* utt = nullptr;
  std::string out_path;
  std::string error;
  bool ok = false;
};

int cmd_features(const PipelineConfig& cfg, int workers) {
  const CorpusManifest manifest = load_input_manifest(cfg);
  const fs::path feat_dir = fs::path(cfg.out_dir) / "features";
  fs::create_directories(feat_dir);

  std::vector<FeatureJob> jobs(manifest.utterances.size());
  std::map<std::string, int> name_uses;
  for (size_t i = 0; i < manifest.utterances.size(); ++i) {
    jobs[i].utt = &manifest.utterances[i];
    std::string stem = sanitize_filename(manifest.utterances[i].id);
    const int uses = name_uses[stem]++;
    if (uses > 0) stem += "-" + std::to_string(uses + 1);  // sanitization collision
    jobs[i].out_path = (feat_dir / (stem + ".csfb")).string();
  }

  // Extraction is pure per utterance and each job owns its output file, so
  // the fan-out needs no coordination beyond the shared cursor.
  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      FeatureJob& job = jobs[i];
      try {
        const WavData wav = read_wav(job.utt->audio);
        if (wav.sample_rate_hz != cfg.frontend.sample_rate_hz) {
          throw DataError(job.utt->audio + ": sample rate " +
                          std::to_string(wav.sample_rate_hz) + " != configured " +
                          std::to_string(cfg.frontend.sample_rate_hz) +
                          " (resampling is not supported)");
        }
        const FeatureMatrix m = extract_logmel(wav.samples, cfg.frontend);
        write_archive(m, cfg.frontend, job.out_path);
        job.ok = true;
      } catch (const std::exception& e) {
        job.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < std::max(1, workers); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  const fs::path index_path = fs::path(cfg.out_dir) / "features_index.tsv";
  std::ofstream index(index_path, std::ios::binary);
  if (!index) throw DataError("cannot open index for writing: " + index_path.string());
  index << "# " << kToolkitName << " " << kToolkitVersion << " features "
        << config_hash(cfg) << "\n";
  size_t failures = 0;
  for (const auto& job : jobs) {
    if (job.ok) {
      index << job.utt->id << "\t" << job.out_path << "\n";
    } else {
      ++failures;
      log_line("error: %s: %s", job.utt->id.c_str(), job.error.c_str());
    }
  }
  index.close();
  log_line("features: %zu ok, %zu failed, index %s", jobs.size() - failures, failures,
           index_path.string().c_str());
  if (failures > 0) {
    throw DataError(std::to_string(failures) + " utterance(s) failed feature extraction");
  }
  return 0;
}

std::map<std::string, std::string> load_feature_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open feature index: " + path);
  std::map<std::string, std::string> index;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected id<TAB>path");
    }
    index[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return index;
}

// ---------------------------------------------------------------------------
// bpe-train / bpe-encode

std::map<std::string, std::string> texts_by_language(const CorpusManifest& manifest) {
  std::map<std::string, std::string> texts;
  for (const auto& u : manifest.utterances) {
    auto& t = texts[u.lang];
    if (!t.empty()) t += "\n";
    t += u.text;
  }
  return texts;
}

int cmd_bpe_train(const PipelineConfig& cfg) {
  const CorpusManifest manifest = load_input_manifest(cfg);
  const auto texts = texts_by_language(manifest);
  const BpeModel model = train_bpe(texts, cfg.bpe_vocab_size);
  fs::create_directories(cfg.out_dir);
  const std::string model_path = (fs::path(cfg.out_dir) / "bpe.model").string();
  save_bpe(model, model_path);

  const TokenAttribution attr = attribute_tokens(model, texts);
  json per_lang = json::object();
  for (const auto& [lang, count] : attr.tokens_per_language) per_lang[lang] = count;
  json report;
  report["provenance"] = {{"toolkit", kToolkitName},
                          {"version", kToolkitVersion},
                          {"config_hash", config_hash(cfg)}};
  report["vocab_size"] = model.vocab_size();
  report["target_vocab_size"] = model.target_vocab_size;
  report["merges"] = model.merges.size();
  report["base_tokens"] = model.base_tokens.size();
  report["specials"] = attr.specials;
  report["tokens_per_language"] = per_lang;
  report["shared_tokens"] = attr.shared;

  const std::string report_path = (fs::path(cfg.out_dir) / "bpe_report.json").string();
  std::ofstream out(report_path, std::ios::binary);
  if (!out) throw DataError("cannot open report for writing: " + report_path);
  out << report.dump(2) << "\n";

  log_line("bpe-train: vocab %d (target %d), %zu merges, model %s", model.vocab_size(),
           model.target_vocab_size, model.merges.size(), model_path.c_str());
  return 0;
}

int cmd_bpe_encode(const std::string& model_path, const std::string& manifest_path,
                   const std::string& text, const std::string& out_path) {
  const BpeModel model = load_bpe(model_path);
  auto ids_line = [&](const std::string& t) {
    std::string line;
    for (int id : encode(model, t)) {
      if (!line.empty()) line += ' ';
      line += std::to_string(id);
    }
    return line;
  };
  if (!text.empty()) {
    std::printf("%s\n", ids_line(text).c_str());
    return 0;
  }
  if (manifest_path.empty()) throw ConfigError("bpe-encode: give --manifest or --text");
  const CorpusManifest manifest = load_manifest(manifest_path);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw DataError("cannot open labels file for writing: " + out_path);
  for (const auto& u : manifest.utterances) {
    out << u.id << '\t' << ids_line(u.text) << "\n";
  }
  log_line("bpe-encode: wrote %zu label rows to %s", manifest.utterances.size(),
           out_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// augment / testset

// Concatenates the per-segment archives of every output record. Returns
// record id -> archive path.
std::map<std::string, std::string> materialize_features(const AugmentedDataset& dataset,
                                                        const std::string& index_path,
                                                        const std::string& out_dir) {
  const auto index = load_feature_index(index_path);
  const fs::path dir = fs::path(out_dir) / "augmented_features";
  fs::create_directories(dir);

  auto archive_of = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw DataError("feature index has no entry for segment id \"" + id + "\"");
    }
    return it->second;
  };

  std::map<std::string, std::string> audio_paths;
  auto emit = [&](const std::string& record_id, const std::vector<std::string>& segments) {
    if (audio_paths.count(record_id)) return;  // repeated mono entry
    std::vector<FeatureMatrix> parts;
    parts.reserve(segments.size());
    FrontendConfig fe;
    for (const auto& id : segments) parts.push_back(read_archive(archive_of(id), &fe));
    const FeatureMatrix joined = concat_features(parts);
    const std::string path = (dir / (sanitize_filename(record_id) + ".csfb")).string();
    write_archive(joined, fe, path);
    audio_paths[record_id] = path;
  };

  for (const auto& id : dataset.mono_utterances) emit(id, {id});
  for (size_t i = 0; i < dataset.cs_utterances.size(); ++i) {
    emit(cs_utterance_id(i), dataset.cs_utterances[i].segment_ids);
  }
  return audio_paths;
}

int cmd_augment(const PipelineConfig& cfg, bool testset_mode,
                const std::string& features_index, bool materialize) {
  const uint64_t seed = require_seed(cfg);
  const CorpusManifest manifest = load_input_manifest(cfg);

  AugmentationConfig acfg;
  acfg.cs_fraction = cfg.cs_fraction;
  acfg.bucket_plan = cfg.bucket_plan;
  acfg.policy = policy_from_name(cfg.policy, manifest.languages);
  acfg.seed = seed;
  acfg.max_retries = cfg.max_retries;

  AugmentedDataset dataset = testset_mode ? build_artificial_testset({manifest}, acfg)
                                          : build_augmented_dataset(manifest, acfg);
  dataset.provenance.config_hash = config_hash(cfg);

  fs::create_directories(cfg.out_dir);
  const char* stem = testset_mode ? "artificial.jsonl" : "augmented.jsonl";
  const std::string out_path = (fs::path(cfg.out_dir) / stem).string();

  std::map<std::string, std::string> audio_paths;
  if (materialize) {
    if (features_index.empty()) throw ConfigError("--materialize needs --features-index");
    audio_paths = materialize_features(dataset, features_index, cfg.out_dir);
    log_line("materialized %zu feature archives", audio_paths.size());
  }
  save_augmented_manifest(dataset, manifest, out_path,
                          materialize ? &audio_paths : nullptr);

  const size_t total = dataset.cs_utterances.size() + dataset.mono_utterances.size();
  log_line("%s: %zu entries (%zu cs / %zu mono, cs fraction %.4f), policy %s, seed %llu",
           testset_mode ? "testset" : "augment", total, dataset.cs_utterances.size(),
           dataset.mono_utterances.size(),
           total == 0 ? 0.0 : double(dataset.cs_utterances.size()) / double(total),
           acfg.policy.name.c_str(), static_cast<unsigned long long>(seed));
  log_line("wrote %s", out_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// stats

int cmd_stats(const std::string& manifest_path, const std::vector<std::string>& sources,
              const std::string& out_path) {
  const AugmentedManifest manifest = load_augmented_manifest(manifest_path);

  std::optional<CorpusManifest> source;
  if (!sources.empty()) {
    std::vector<CorpusManifest> all;
    for (const auto& p : sources) all.push_back(load_manifest(p));
    source = all.size() == 1 ? std::move(all.front()) : merge_manifests(all);
  }
  const DatasetStats stats = dataset_stats(manifest, source ? &*source : nullptr);

  json j;
  j["manifest"] = manifest_path;
  j["provenance"] = json::parse(manifest.provenance_json);
  j["total"] = stats.total;
  j["cs_count"] = stats.cs_count;
  j["mono_count"] = stats.mono_count;
  j["cs_fraction"] = stats.cs_fraction;
  json hist = json::object();
  for (const auto& [target, count] : stats.bucket_histogram) {
    hist[std::to_string(target)] = count;
  }
  j["bucket_histogram"] = hist;
  json trans = json::object();
  for (const auto& [pair, count] : stats.transition_counts) trans[pair] = count;
  j["transitions"] = trans;
  json segs = json::object();
  for (const auto& [lang, count] : stats.segments_per_language) segs[lang] = count;
  j["segments_per_language"] = segs;
  j["same_language_adjacencies"] = stats.same_language_adjacencies;
  j["duplicate_mono_entries"] = stats.duplicate_mono_entries;
  if (stats.missing_source_ids) {
    j["coverage"] = {{"checked", true}, {"missing_source_ids", *stats.missing_source_ids}};
  } else {
    j["coverage"] = {{"checked", false}};
  }

  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("cannot open stats output: " + out_path);
    out << text;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval

std::map<std::string, std::string> read_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::map<std::string, std::string> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected \"utterance-id<TAB>text\"");
    }
    const std::string id = line.substr(0, tab);
    if (rows.count(id)) {
      throw DataError(path + ":" + std::to_string(line_no) + ": duplicate id \"" + id + "\"");
    }
    rows[id] = line.substr(tab + 1);
  }
  return rows;
}

std::string ascii_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return s;
}

// "word|lang" tokens; a token without '|' is untagged.
std::vector<TaggedWord> parse_tagged(const std::string& text) {
  std::vector<TaggedWord> out;
  for (const auto& token : tokenize_words(text)) {
    const size_t bar = token.rfind('|');
    if (bar == std::string::npos || bar == 0 || bar + 1 == token.size()) {
      out.push_back({token, ""});
    } else {
      out.push_back({token.substr(0, bar), token.substr(bar + 1)});
    }
  }
  return out;
}

int cmd_eval(const std::vector<std::string>& ref_paths, const std::string& hyp_path,
             const std::string& manifest_path, const std::string& embedded_lang,
             bool lowercase, bool json_out) {
  const auto hyps = read_tsv(hyp_path);

  // Optional language grouping: a corpus manifest mapping ids to languages.
  std::map<std::string, std::string> lang_of;
  if (!manifest_path.empty()) {
    for (const auto& u : load_manifest(manifest_path).utterances) lang_of[u.id] = u.lang;
  }

  struct TaggedItem {
    std::vector<TaggedWord> ref;
    std::vector<std::string> hyp;
  };
  std::vector<EvalItem> items;
  std::vector<TaggedItem> tagged_items;
  std::set<std::string> ref_ids;

  for (const auto& ref_path : ref_paths) {
    const std::string set_name = fs::path(ref_path).stem().string();
    for (const auto& [id, text] : read_tsv(ref_path)) {
      if (!ref_ids.insert(id).second) {
        throw DataError("eval: id \"" + id + "\" appears in more than one reference file");
      }
      auto hit = hyps.find(id);
      if (hit == hyps.end()) {
        throw DataError("eval: id \"" + id + "\" from " + ref_path +
                        " missing in hypotheses " + hyp_path);
      }
      const std::string ref_text = lowercase ? ascii_lower(text) : text;
      const std::string hyp_text = lowercase ? ascii_lower(hit->second) : hit->second;

      const std::vector<TaggedWord> tagged = parse_tagged(ref_text);
      if (!embedded_lang.empty()) tagged_items.push_back({tagged, tokenize_words(hyp_text)});

      // WER always scores surfaces with tags stripped.
      std::string surface;
      for (const auto& w : tagged) {
        if (!surface.empty()) surface += ' ';
        surface += w.word;
      }
      const auto lang_it = lang_of.find(id);
      items.push_back({id, surface, hyp_text, set_name,
                       lang_it == lang_of.end() ? "" : lang_it->second});
    }
  }
  for (const auto& [id, text] : hyps) {
    if (!ref_ids.count(id)) {
      throw DataError("eval: hypothesis id \"" + id + "\" has no reference");
    }
  }

  const DatasetReport report = dataset_report(items);

  std::optional<double> accuracy;
  int64_t tagged_total = 0, tagged_correct = 0;
  if (!embedded_lang.empty()) {
    for (const auto& item : tagged_items) {
      int64_t here = 0;
      for (const auto& w : item.ref) here += (w.lang == embedded_lang) ? 1 : 0;
      if (here == 0) continue;
      const double acc = embedded_accuracy(item.ref, item.hyp, embedded_lang);
      tagged_total += here;
      tagged_correct += int64_t(std::llround(acc * double(here) / 100.0));
    }
    if (tagged_total == 0) {
      throw DataError("eval: no reference words tagged \"" + embedded_lang + "\"");
    }
    accuracy = 100.0 * double(tagged_correct) / double(tagged_total);
  }

  if (json_out) {
    auto wer_json = [](const WerReport& r) {
      return json{{"wer_percent", r.wer_percent()},
                  {"substitutions", r.substitutions},
                  {"insertions", r.insertions},
                  {"deletions", r.deletions},
                  {"hits", r.hits},
                  {"ref_words", r.ref_words}};
    };
    json j;
    j["overall"] = wer_json(report.overall);
    json sets = json::object();
    for (const auto& [name, r] : report.per_set) sets[name] = wer_json(r);
    j["per_set"] = sets;
    json langs = json::object();
    for (const auto& [name, r] : report.per_language) langs[name] = wer_json(r);
    j["per_language"] = langs;
    if (accuracy) {
      j["embedded"] = {{"lang", embedded_lang},
                       {"accuracy_percent", *accuracy},
                       {"correct", tagged_correct},
                       {"tagged", tagged_total}};
    }
    std::printf("%s\n", j.dump(2).c_str());
  } else {
    const WerReport& o = report.overall;
    std::printf("WER: %.2f%% (S=%lld I=%lld D=%lld H=%lld N=%lld)\n", o.wer_percent(),
                static_cast<long long>(o.substitutions),
                static_cast<long long>(o.insertions), static_cast<long long>(o.deletions),
                static_cast<long long>(o.hits), static_cast<long long>(o.ref_words));
    if (report.per_set.size() > 1) {
      for (const auto& [name, r] : report.per_set) {
        std::printf("  %s: %.2f%% (N=%lld)\n", name.c_str(), r.wer_percent(),
                    static_cast<long long>(r.ref_words));
      }
    }
    for (const auto& [name, r] : report.per_language) {
      std::printf("  lang %s: %.2f%% (N=%lld)\n", name.c_str(), r.wer_percent(),
                  static_cast<long long>(r.ref_words));
    }
    if (accuracy) {
      std::printf("Embedded-%s accuracy: %.2f%% (%lld/%lld)\n", embedded_lang.c_str(),
                  *accuracy, static_cast<long long>(tagged_correct),
                  static_cast<long long>(tagged_total));
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolkitName) + " - code-switching speech data toolkit (v" +
               kToolkitVersion + ")"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<uint64_t> seed_flag;
  std::string policy_flag;
  std::optional<double> cs_fraction_flag;
  std::string out_flag;
  int workers = 1;

  auto add_config_flags = [&](CLI::App* cmd, bool with_augment_flags) {
    cmd->add_option("--config", config_path, "pipeline config (JSON)")->required();
    cmd->add_option("--out", out_flag, "output directory (overrides config)");
    if (with_augment_flags) {
      cmd->add_option("--seed", seed_flag, "PRNG seed (overrides config)");
      cmd->add_option("--policy", policy_flag, "transition policy name (overrides config)");
      cmd->add_option("--cs-fraction", cs_fraction_flag,
                      "fraction of CS utterances (overrides config)");
    }
  };

  CLI::App* features = app.add_subcommand("features", "extract log-mel feature archives");
  add_config_flags(features, false);
  features->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  CLI::App* bpe_train = app.add_subcommand("bpe-train", "train the joint BPE model");
  add_config_flags(bpe_train, false);

  CLI::App* bpe_encode = app.add_subcommand("bpe-encode", "encode text to label ids");
  std::string model_path, encode_manifest, encode_text, encode_out = "labels.tsv";
  bpe_encode->add_option("--model", model_path, "bpe model file")->required();
  bpe_encode->add_option("--manifest", encode_manifest, "corpus manifest to encode");
  bpe_encode->add_option("--text", encode_text, "encode one string to stdout");
  bpe_encode->add_option("--out", encode_out, "labels output (id<TAB>ids)");

  std::string features_index;
  bool materialize = false;
  CLI::App* augment = app.add_subcommand("augment", "build the augmented training set");
  add_config_flags(augment, true);
  augment->add_option("--features-index", features_index, "id -> archive index (tsv)");
  augment->add_flag("--materialize", materialize, "write concatenated feature archives");

  CLI::App* testset = app.add_subcommand("testset", "build an artificial CS test set");
  add_config_flags(testset, true);
  testset->add_option("--features-index", features_index, "id -> archive index (tsv)");
  testset->add_flag("--materialize", materialize, "write concatenated feature archives");

  CLI::App* stats = app.add_subcommand("stats", "report constraints of an augmented manifest");
  std::string stats_manifest, stats_out;
  std::vector<std::string> stats_sources;
  stats->add_option("--manifest", stats_manifest, "augmented manifest")->required();
  stats->add_option("--source", stats_sources, "source corpus manifest(s) for coverage");
  stats->add_option("--out", stats_out, "write the JSON report here instead of stdout");

  CLI::App* eval = app.add_subcommand("eval", "score hypotheses against references");
  std::vector<std::string> ref_paths;
  std::string hyp_path, embedded_lang, eval_manifest;
  bool lowercase = false, json_out = false;
  eval->add_option("--refs", ref_paths, "reference file(s), id<TAB>text")->required();
  eval->add_option("--hyps", hyp_path, "hypothesis file, id<TAB>text")->required();
  eval->add_option("--manifest", eval_manifest,
                   "corpus manifest for a per-language WER breakdown");
  eval->add_option("--embedded-lang", embedded_lang,
                   "report embedded-language word accuracy (refs carry word|lang tags)");
  eval->add_flag("--lowercase", lowercase, "ASCII-lowercase both sides before scoring");
  eval->add_flag("--json", json_out, "JSON report on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    auto effective_config = [&]() {
      PipelineConfig cfg = load_config(config_path);
      if (seed_flag) cfg.seed = *seed_flag;
      if (!policy_flag.empty()) cfg.policy = policy_flag;
      if (cs_fraction_flag) cfg.cs_fraction = *cs_fraction_flag;
      if (!out_flag.empty()) cfg.out_dir = out_flag;
      return cfg;
    };

    if (features->parsed()) return cmd_features(effective_config(), workers);
    if (bpe_train->parsed()) return cmd_bpe_train(effective_config());
    if (bpe_encode->parsed()) {
      return cmd_bpe_encode(model_path, encode_manifest, encode_text, encode_out);
    }
    if (augment->parsed()) {
      return cmd_augment(effective_config(), false, features_index, materialize);
    }
    if (testset->parsed()) {
      return cmd_augment(effective_config(), true, features_index, materialize);
    }
    if (stats->parsed()) return cmd_stats(stats_manifest, stats_sources, stats_out);
    if (eval->parsed()) {
      return cmd_eval(ref_paths, hyp_path, eval_manifest, embedded_lang, lowercase,
                      json_out);
    }
    return kExitConfig;
  } catch (const ConfigError& e) {
    log_line("config error: %s", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    log_line("data error: %s", e.what());
    return kExitData;
  } catch (const InfeasibleError& e) {
    log_line("infeasible: %s", e.what());
    return kExitInfeasible;
  } catch (const std::exception& e) {
    log_line("internal error: %s", e.what());
    return kExitInternal;
  }
}
