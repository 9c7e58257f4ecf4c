// src/corpus.cc

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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "csaug/errors.h"

namespace csaug {

using nlohmann::json;

namespace {

std::string loc(const std::string& origin, size_t line) {
  return origin + ":" + std::to_string(line) + ": ";
}

json parse_line(const std::string& text, const std::string& origin, size_t line) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw DataError(loc(origin, line) + "malformed record (expected a JSON object)");
  }
  return j;
}

void require_fields(const json& j, const std::set<std::string>& fields,
                    const std::string& origin, size_t line) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!fields.count(it.key())) {
      throw DataError(loc(origin, line) + "unknown field \"" + it.key() + "\"");
    }
  }
  for (const auto& f : fields) {
    if (!j.contains(f)) {
      throw DataError(loc(origin, line) + "missing field \"" + f + "\"");
    }
  }
}

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

double CorpusManifest::total_duration_s() const {
  double total = 0.0;
  for (const auto& u : utterances) total += u.duration_s;
  return total;
}

CorpusManifest parse_manifest(std::istream& in, const std::string& origin) {
  CorpusManifest m;
  std::string line;
  size_t line_no = 0;
  bool have_header = false;
  std::set<std::string> inventory;
  std::unordered_map<std::string, size_t> seen_ids;  // id -> first line

  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;

    if (!have_header) {
      json h = parse_line(line, origin, line_no);
      require_fields(h, {"languages", "source_name"}, origin, line_no);
      if (!h["languages"].is_array() || !h["source_name"].is_string()) {
        throw DataError(loc(origin, line_no) + "malformed header");
      }
      m.source_name = h["source_name"].get<std::string>();
      for (const auto& l : h["languages"]) {
        if (!l.is_string()) {
          throw DataError(loc(origin, line_no) + "language codes must be strings");
        }
        if (!inventory.insert(l.get<std::string>()).second) {
          throw DataError(loc(origin, line_no) + "duplicate language code \"" +
                          l.get<std::string>() + "\"");
        }
      }
      m.languages.assign(inventory.begin(), inventory.end());
      have_header = true;
      continue;
    }

    json r = parse_line(line, origin, line_no);
    require_fields(r, {"id", "lang", "audio", "duration_s", "text"}, origin, line_no);
    if (!r["id"].is_string() || !r["lang"].is_string() || !r["audio"].is_string() ||
        !r["duration_s"].is_number() || !r["text"].is_string()) {
      throw DataError(loc(origin, line_no) + "field with wrong type");
    }

    Utterance u;
    u.id = r["id"].get<std::string>();
    u.lang = r["lang"].get<std::string>();
    u.audio = r["audio"].get<std::string>();
    u.duration_s = r["duration_s"].get<double>();
    u.text = r["text"].get<std::string>();

    auto [it, inserted] = seen_ids.emplace(u.id, line_no);
    if (!inserted) {
      throw DataError(loc(origin, line_no) + "duplicate id \"" + u.id +
                      "\" (first seen at line " + std::to_string(it->second) + ")");
    }
    if (!inventory.count(u.lang)) {
      throw DataError(loc(origin, line_no) + "language \"" + u.lang +
                      "\" not in the declared inventory");
    }
    if (!(u.duration_s > 0.0)) {
      throw DataError(loc(origin, line_no) + "non-positive duration for id \"" +
                      u.id + "\"");
    }
    m.utterances.push_back(std::move(u));
  }
  return m;
}

CorpusManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest file: " + path);
  return parse_manifest(in, path);
}

std::string manifest_to_string(const CorpusManifest& m) {
  std::string out;
  std::vector<std::string> languages = m.languages;
  std::sort(languages.begin(), languages.end());
  json h;
  h["languages"] = languages;
  h["source_name"] = m.source_name;
  out += h.dump();
  out += "\n";
  for (const auto& u : m.utterances) {
    json r;
    r["id"] = u.id;
    r["lang"] = u.lang;
    r["audio"] = u.audio;
    r["duration_s"] = u.duration_s;
    r["text"] = u.text;
    out += r.dump();
    out += "\n";
  }
  return out;
}

void save_manifest(const CorpusManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open manifest file for writing: " + path);
  out << manifest_to_string(m);
  if (!out) throw DataError("failed writing manifest: " + path);
}

void validate_manifest(const CorpusManifest& m) {
  std::set<std::string> inventory(m.languages.begin(), m.languages.end());
  if (inventory.size() != m.languages.size()) {
    throw DataError("manifest \"" + m.source_name + "\": duplicate language codes");
  }
  std::unordered_set<std::string> ids;
  for (const auto& u : m.utterances) {
    if (!ids.insert(u.id).second) {
      throw DataError("manifest \"" + m.source_name + "\": duplicate id \"" + u.id + "\"");
    }
    if (!inventory.count(u.lang)) {
      throw DataError("manifest \"" + m.source_name + "\": language \"" + u.lang +
                      "\" of id \"" + u.id + "\" not in the declared inventory");
    }
    if (!(u.duration_s > 0.0)) {
      throw DataError("manifest \"" + m.source_name + "\": non-positive duration for id \"" +
                      u.id + "\"");
    }
  }
}

CorpusManifest merge_manifests(const std::vector<CorpusManifest>& manifests) {
  CorpusManifest merged;
  std::set<std::string> languages;
  std::unordered_set<std::string> ids;
  std::string name;

  size_t total = 0;
  for (const auto& m : manifests) total += m.utterances.size();
  merged.utterances.reserve(total);

  for (const auto& m : manifests) {
    if (m.source_name.empty()) {
      throw DataError("cannot merge a manifest without a source_name");
    }
    name += name.empty() ? m.source_name : "+" + m.source_name;
    languages.insert(m.languages.begin(), m.languages.end());
    for (const auto& u : m.utterances) {
      Utterance copy = u;
      copy.id = m.source_name + "/" + u.id;
      if (!ids.insert(copy.id).second) {
        throw DataError("id collision while merging: \"" + copy.id + "\"");
      }
      merged.utterances.push_back(std::move(copy));
    }
  }
  merged.source_name = name;
  merged.languages.assign(languages.begin(), languages.end());
  return merged;
}

std::map<std::string, LanguageStats> composition_stats(const CorpusManifest& m) {
  std::map<std::string, LanguageStats> stats;
  double total = 0.0;
  for (const auto& u : m.utterances) {
    auto& s = stats[u.lang];
    s.utterance_count += 1;
    s.total_duration_s += u.duration_s;
    total += u.duration_s;
  }
  if (total > 0.0) {
    for (auto& [lang, s] : stats) s.duration_fraction = s.total_duration_s / total;
  }
  return stats;
}

}  // namespace csaug
