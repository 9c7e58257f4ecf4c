// src/bpe.cc

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

#include "csaug/bpe.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "csaug/errors.h"

namespace csaug {

namespace {

constexpr uint64_t pair_key(int left, int right) {
  return (uint64_t(uint32_t(left)) << 32) | uint64_t(uint32_t(right));
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

// A distinct word form with its corpus frequency; symbols are token ids.
struct TrainWord {
  std::vector<int> syms;
  int64_t count = 0;
};

int token_to_id_at(const BpeModel& model, const std::string& token) {
  auto it = model.token_to_id.find(token);
  if (it == model.token_to_id.end()) {
    throw DataError("bpe: token not in vocabulary: \"" + token + "\"");
  }
  return it->second;
}

// Applies one merge left-to-right, skipping past a fused pair so
// overlapping occurrences ("aaa" under (a,a)) fuse once.
void apply_merge(std::vector<int>& syms, int left, int right, int merged) {
  size_t w = 0;
  for (size_t r = 0; r < syms.size();) {
    if (r + 1 < syms.size() && syms[r] == left && syms[r + 1] == right) {
      syms[w++] = merged;
      r += 2;
    } else {
      syms[w++] = syms[r++];
    }
  }
  syms.resize(w);
}

}  // namespace

std::vector<std::string> utf8_code_points(std::string_view text) {
  std::vector<std::string> cps;
  size_t i = 0;
  while (i < text.size()) {
    const auto b = static_cast<unsigned char>(text[i]);
    size_t len = 1;
    if ((b & 0x80) == 0x00) len = 1;
    else if ((b & 0xE0) == 0xC0) len = 2;
    else if ((b & 0xF0) == 0xE0) len = 3;
    else if ((b & 0xF8) == 0xF0) len = 4;
    // Lenient: a truncated or stray continuation byte becomes its own symbol.
    size_t have = 1;
    while (have < len && i + have < text.size() &&
           (static_cast<unsigned char>(text[i + have]) & 0xC0) == 0x80) {
      ++have;
    }
    cps.emplace_back(text.substr(i, have));
    i += have;
  }
  return cps;
}

std::map<std::string, std::string> truncate_to_equal_chars(
    const std::map<std::string, std::string>& text_per_language) {
  size_t min_cps = SIZE_MAX;
  std::map<std::string, std::vector<std::string>> cps;
  for (const auto& [lang, text] : text_per_language) {
    cps[lang] = utf8_code_points(text);
    min_cps = std::min(min_cps, cps[lang].size());
  }
  std::map<std::string, std::string> out;
  for (const auto& [lang, points] : cps) {
    std::string t;
    for (size_t i = 0; i < min_cps; ++i) t += points[i];
    out[lang] = std::move(t);
  }
  return out;
}

void BpeModel::rebuild_index() {
  id_to_token.clear();
  token_to_id.clear();
  merge_rank.clear();
  merge_result.clear();

  id_to_token = {kUnkToken, kSosToken, kEosToken};
  for (const auto& t : base_tokens) id_to_token.push_back(t);
  for (size_t i = 0; i < id_to_token.size(); ++i) token_to_id[id_to_token[i]] = int(i);

  int rank = 0;
  for (const auto& rule : merges) {
    auto lit = token_to_id.find(rule.left);
    auto rit = token_to_id.find(rule.right);
    if (lit == token_to_id.end() || rit == token_to_id.end()) {
      throw DataError("bpe model: merge rule references unknown token \"" +
                      rule.left + "\" / \"" + rule.right + "\"");
    }
    const std::string merged = rule.left + rule.right;
    int merged_id;
    auto mit = token_to_id.find(merged);
    if (mit == token_to_id.end()) {
      merged_id = int(id_to_token.size());
      id_to_token.push_back(merged);
      token_to_id[merged] = merged_id;
    } else {
      // Two different merge paths can produce the same surface; the vocab
      // entry is shared.
      merged_id = mit->second;
    }
    const uint64_t key = pair_key(lit->second, rit->second);
    merge_rank.emplace(key, rank);
    merge_result.emplace(key, merged_id);
    ++rank;
  }
}

BpeModel train_bpe(const std::map<std::string, std::string>& text_per_language,
                   int vocab_size) {
  if (text_per_language.empty()) throw ConfigError("bpe: no training text given");
  for (const auto& [lang, text] : text_per_language) {
    if (split_words(text).empty()) {
      throw DataError("bpe: empty corpus for language \"" + lang + "\"");
    }
  }

  const auto truncated = truncate_to_equal_chars(text_per_language);

  // Word frequency over the union of the equal-size corpora. std::map keeps
  // everything downstream independent of hash order.
  std::map<std::string, int64_t> word_counts;
  for (const auto& [lang, text] : truncated) {
    for (auto& w : split_words(text)) word_counts[w] += 1;
  }
  if (word_counts.empty()) {
    throw DataError("bpe: corpora empty after equal-size truncation");
  }

  // Base inventory: the word marker plus every code point seen.
  std::set<std::string> base;
  base.insert(kWordMarker);
  std::map<std::string, std::vector<std::string>> word_cps;
  for (const auto& [word, count] : word_counts) {
    auto cps = utf8_code_points(word);
    for (const auto& cp : cps) base.insert(cp);
    word_cps[word] = std::move(cps);
  }

  BpeModel model;
  model.target_vocab_size = vocab_size;
  model.base_tokens.assign(base.begin(), base.end());
  if (vocab_size < int(model.base_tokens.size()) + 3 + 1) {
    throw ConfigError("bpe: vocab_size " + std::to_string(vocab_size) +
                      " too small for base inventory of " +
                      std::to_string(model.base_tokens.size()) + " (+3 specials)");
  }
  model.rebuild_index();

  std::vector<TrainWord> words;
  words.reserve(word_counts.size());
  for (const auto& [word, count] : word_counts) {
    TrainWord tw;
    tw.count = count;
    tw.syms.push_back(token_to_id_at(model, kWordMarker));
    for (const auto& cp : word_cps[word]) tw.syms.push_back(token_to_id_at(model, cp));
    words.push_back(std::move(tw));
  }

  while (model.vocab_size() < vocab_size) {
    // Count every adjacent occurrence (overlaps included).
    std::unordered_map<uint64_t, int64_t> pair_counts;
    for (const auto& w : words) {
      for (size_t i = 0; i + 1 < w.syms.size(); ++i) {
        pair_counts[pair_key(w.syms[i], w.syms[i + 1])] += w.count;
      }
    }
    if (pair_counts.empty()) break;  // nothing left to merge

    // Best = highest count, ties to the lexicographically smallest pair.
    // The selection is a total order, so hash iteration order is irrelevant.
    bool have_best = false;
    uint64_t best_key = 0;
    int64_t best_count = 0;
    std::pair<std::string_view, std::string_view> best_pair;
    for (const auto& [key, count] : pair_counts) {
      const int left = int(key >> 32), right = int(key & 0xffffffff);
      std::pair<std::string_view, std::string_view> p{model.id_to_token[size_t(left)],
                                                      model.id_to_token[size_t(right)]};
      if (!have_best || count > best_count || (count == best_count && p < best_pair)) {
        have_best = true;
        best_key = key;
        best_count = count;
        best_pair = p;
      }
    }

    const int left = int(best_key >> 32), right = int(best_key & 0xffffffff);
    model.merges.push_back(MergeRule{model.id_to_token[size_t(left)],
                                     model.id_to_token[size_t(right)]});
    const std::string merged = model.merges.back().left + model.merges.back().right;
    int merged_id;
    auto it = model.token_to_id.find(merged);
    if (it == model.token_to_id.end()) {
      merged_id = model.vocab_size();
      model.id_to_token.push_back(merged);
      model.token_to_id[merged] = merged_id;
    } else {
      merged_id = it->second;
    }
    for (auto& w : words) apply_merge(w.syms, left, right, merged_id);
  }

  model.rebuild_index();
  return model;
}

std::vector<int> encode(const BpeModel& model, std::string_view text) {
  std::vector<int> out;
  const int marker_id = model.token_to_id.at(kWordMarker);
  for (const auto& word : split_words(text)) {
    std::vector<int> syms;
    syms.push_back(marker_id);
    for (const auto& cp : utf8_code_points(word)) {
      auto it = model.token_to_id.find(cp);
      syms.push_back(it == model.token_to_id.end() ? kUnkId : it->second);
    }
    // Iteratively fuse the lowest-rank pair present; equivalent to applying
    // the merge list in training order.
    for (;;) {
      int best_rank = -1;
      int best_left = 0, best_right = 0, best_merged = 0;
      for (size_t i = 0; i + 1 < syms.size(); ++i) {
        auto it = model.merge_rank.find(pair_key(syms[i], syms[i + 1]));
        if (it != model.merge_rank.end() && (best_rank < 0 || it->second < best_rank)) {
          best_rank = it->second;
          best_left = syms[i];
          best_right = syms[i + 1];
          best_merged = model.merge_result.at(pair_key(syms[i], syms[i + 1]));
        }
      }
      if (best_rank < 0) break;
      apply_merge(syms, best_left, best_right, best_merged);
    }
    out.insert(out.end(), syms.begin(), syms.end());
  }
  return out;
}

std::string decode(const BpeModel& model, std::span<const int> ids) {
  std::string joined;
  for (int id : ids) {
    if (id < 0 || id >= model.vocab_size()) {
      throw DataError("bpe: id out of range: " + std::to_string(id) +
                      " (vocab size " + std::to_string(model.vocab_size()) + ")");
    }
    joined += model.id_to_token[size_t(id)];
  }
  // Markers back to spaces; the first word's marker becomes a leading space
  // that is dropped.
  std::string out;
  const std::string marker = kWordMarker;
  size_t i = 0;
  while (i < joined.size()) {
    if (joined.compare(i, marker.size(), marker) == 0) {
      out += ' ';
      i += marker.size();
    } else {
      out += joined[i++];
    }
  }
  if (!out.empty() && out.front() == ' ') out.erase(out.begin());
  return out;
}

std::vector<int> concat_labels(const std::vector<std::vector<int>>& parts) {
  std::vector<int> out;
  size_t total = 0;
  for (const auto& p : parts) total += p.size();
  out.reserve(total);
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::string bpe_to_string(const BpeModel& model) {
  std::ostringstream out;
  out << "csaug-bpe 1\n";
  out << "vocab_size " << model.target_vocab_size << "\n";
  out << "marker " << kWordMarker << "\n";
  out << "specials " << kUnkToken << " " << kSosToken << " " << kEosToken << "\n";
  out << "base " << model.base_tokens.size() << "\n";
  for (const auto& t : model.base_tokens) out << t << "\n";
  out << "merges " << model.merges.size() << "\n";
  for (const auto& m : model.merges) out << m.left << " " << m.right << "\n";
  return out.str();
}

BpeModel bpe_from_string(std::string_view text, const std::string& origin) {
  std::istringstream in{std::string(text)};
  std::string line;

  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw ConfigError(origin + ": truncated bpe model file (expected " +
                        std::string(what) + ")");
    }
    return line;
  };

  BpeModel model;
  {
    std::istringstream hdr(next_line("header"));
    std::string name;
    int version = 0;
    hdr >> name >> version;
    if (name != "csaug-bpe" || version != 1) {
      throw ConfigError(origin + ": not a csaug-bpe v1 model file");
    }
  }
  auto expect_kv = [&](const std::string& key) {
    std::istringstream ls(next_line(key.c_str()));
    std::string k;
    ls >> k;
    if (k != key) throw ConfigError(origin + ": expected \"" + key + "\" line");
    return ls;
  };
  {
    auto ls = expect_kv("vocab_size");
    ls >> model.target_vocab_size;
  }
  {
    auto ls = expect_kv("marker");
    std::string marker;
    ls >> marker;
    if (marker != kWordMarker) {
      throw ConfigError(origin + ": unsupported word marker \"" + marker + "\"");
    }
  }
  {
    auto ls = expect_kv("specials");
    std::string u, s, e;
    ls >> u >> s >> e;
    if (u != kUnkToken || s != kSosToken || e != kEosToken) {
      throw ConfigError(origin + ": unsupported special tokens");
    }
  }
  size_t base_count = 0;
  {
    auto ls = expect_kv("base");
    ls >> base_count;
  }
  for (size_t i = 0; i < base_count; ++i) {
    model.base_tokens.push_back(next_line("base token"));
    if (model.base_tokens.back().empty()) {
      throw ConfigError(origin + ": empty base token");
    }
  }
  size_t merge_count = 0;
  {
    auto ls = expect_kv("merges");
    ls >> merge_count;
  }
  for (size_t i = 0; i < merge_count; ++i) {
    std::istringstream ls(next_line("merge rule"));
    MergeRule rule;
    ls >> rule.left >> rule.right;
    if (rule.left.empty() || rule.right.empty()) {
      throw ConfigError(origin + ": malformed merge rule at index " + std::to_string(i));
    }
    model.merges.push_back(std::move(rule));
  }
  model.rebuild_index();
  return model;
}

void save_bpe(const BpeModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open bpe model for writing: " + path);
  out << bpe_to_string(model);
  if (!out) throw DataError("failed writing bpe model: " + path);
}

BpeModel load_bpe(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open bpe model: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bpe_from_string(text, path);
}

TokenAttribution attribute_tokens(const BpeModel& model,
                                  const std::map<std::string, std::string>& text_per_language) {
  const auto truncated = truncate_to_equal_chars(text_per_language);
  // Occurrences of each token when encoding each language's training share.
  std::map<std::string, std::vector<int64_t>> counts;  // lang -> per-id counts
  for (const auto& [lang, text] : truncated) {
    std::vector<int64_t> c(size_t(model.vocab_size()), 0);
    for (int id : encode(model, text)) c[size_t(id)] += 1;
    counts[lang] = std::move(c);
  }

  TokenAttribution attr;
  for (const auto& [lang, c] : counts) attr.tokens_per_language[lang] = 0;
  for (int id = 3; id < model.vocab_size(); ++id) {
    int64_t best = 0;
    std::string best_lang;
    bool tie = false;
    for (const auto& [lang, c] : counts) {
      if (c[size_t(id)] > best) {
        best = c[size_t(id)];
        best_lang = lang;
        tie = false;
      } else if (c[size_t(id)] == best && best > 0) {
        tie = true;
      }
    }
    if (best == 0 || tie) {
      attr.shared += 1;
    } else {
      attr.tokens_per_language[best_lang] += 1;
    }
  }
  return attr;
}

}  // namespace csaug
