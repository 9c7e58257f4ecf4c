// include/csaug/bpe.h

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

#ifndef CSAUG_BPE_H_
#define CSAUG_BPE_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace csaug {

// Reserved ids; these tokens never participate in merges.
inline constexpr int kUnkId = 0;
inline constexpr int kSosId = 1;
inline constexpr int kEosId = 2;

inline constexpr const char* kUnkToken = "<unk>";
inline constexpr const char* kSosToken = "<s>";
inline constexpr const char* kEosToken = "</s>";

// Word-initial marker so decoding can restore spaces. Words are split on
// whitespace and the marker is prepended as its own symbol.
inline constexpr const char* kWordMarker = "\xE2\x96\x81";  // U+2581

struct MergeRule {
  std::string left;
  std::string right;
  bool operator==(const MergeRule&) const = default;
};

// One joint byte-pair encoding over all languages. Ids are dense:
// 0..2 specials, then the sorted base inventory, then merged tokens in
// merge order.
struct BpeModel {
  int target_vocab_size = 0;               // configured size
  std::vector<std::string> base_tokens;    // sorted single code points + marker
  std::vector<MergeRule> merges;           // application order

  // Derived by rebuild_index().
  std::vector<std::string> id_to_token;
  std::unordered_map<std::string, int> token_to_id;
  std::unordered_map<uint64_t, int> merge_rank;    // (left id, right id) -> rank
  std::unordered_map<uint64_t, int> merge_result;  // (left id, right id) -> merged id

  int vocab_size() const { return int(id_to_token.size()); }
  void rebuild_index();

  bool operator==(const BpeModel& o) const {
    return target_vocab_size == o.target_vocab_size && base_tokens == o.base_tokens &&
           merges == o.merges;
  }
};

// Greedy most-frequent-pair training on the union of all languages' text.
// Corpora are first truncated to the same code-point count (prefix of each),
// so every language contributes the same amount of text. Ties on pair
// frequency break to the lexicographically smallest pair. Training stops
// at vocab_size entries, or earlier if no adjacent pair remains to merge.
BpeModel train_bpe(const std::map<std::string, std::string>& text_per_language,
                   int vocab_size);

// Whitespace-split words, marker-prefixed, merges applied in training order.
// Characters outside the base inventory map to <unk>.
std::vector<int> encode(const BpeModel& model, std::string_view text);

// Inverse of encode for unk-free text: token surfaces concatenated, markers
// turned back into spaces. Out-of-range ids are an error.
std::string decode(const BpeModel& model, std::span<const int> ids);

// Plain concatenation; no language tags or separators are inserted.
std::vector<int> concat_labels(const std::vector<std::vector<int>>& parts);

// Versioned text model file: header, base inventory, then one merge rule per
// line in application order.
void save_bpe(const BpeModel& model, const std::string& path);
BpeModel load_bpe(const std::string& path);
std::string bpe_to_string(const BpeModel& model);
BpeModel bpe_from_string(std::string_view text, const std::string& origin);

// Diagnostic: attributes every non-special token to the language whose
// (equal-size) training text uses it most. Ties and unused tokens count as
// shared. Reported for inspection only; no per-language count is an
// invariant of the model.
struct TokenAttribution {
  std::map<std::string, int64_t> tokens_per_language;
  int64_t shared = 0;
  int64_t specials = 3;
};
TokenAttribution attribute_tokens(const BpeModel& model,
                                  const std::map<std::string, std::string>& text_per_language);

// Shared helpers (also used by training internals and tests).
std::vector<std::string> utf8_code_points(std::string_view text);
std::map<std::string, std::string> truncate_to_equal_chars(
    const std::map<std::string, std::string>& text_per_language);

}  // namespace csaug

#endif  // CSAUG_BPE_H_
