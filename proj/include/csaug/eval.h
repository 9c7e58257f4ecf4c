// include/csaug/eval.h

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

#ifndef CSAUG_EVAL_H_
#define CSAUG_EVAL_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace csaug {

struct WerReport {
  int64_t substitutions = 0;
  int64_t insertions = 0;
  int64_t deletions = 0;
  int64_t hits = 0;
  int64_t ref_words = 0;

  double wer_percent() const {
    return 100.0 * double(substitutions + insertions + deletions) / double(ref_words);
  }
};

// Split on runs of whitespace; no case folding or punctuation stripping.
std::vector<std::string> tokenize_words(std::string_view text);

enum class AlignOp { kMatch, kSub, kDel, kIns };

// One optimal unit-cost alignment. Ties between equal-cost paths break
// match > substitution > deletion > insertion during backtrace, which makes
// downstream word-level metrics deterministic.
std::vector<AlignOp> align_words(const std::vector<std::string>& ref,
                                 const std::vector<std::string>& hyp);

// Minimum-edit-distance WER. Empty hypotheses are fine; an empty reference
// is undefined and raises DataError.
WerReport wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

struct TaggedWord {
  std::string word;
  std::string lang;  // empty = untagged
};

// Accuracy of target-language reference words reproduced exactly, under the
// same alignment as wer(). Requires at least one target-tagged word.
double embedded_accuracy(const std::vector<TaggedWord>& ref,
                         const std::vector<std::string>& hyp,
                         const std::string& target_lang);

struct EvalItem {
  std::string id;
  std::string ref_text;
  std::string hyp_text;
  std::string set_name;  // optional grouping key
  std::string lang;      // optional grouping key
};

struct DatasetReport {
  WerReport overall;  // micro-averaged: pooled counts, not averaged percents
  std::map<std::string, WerReport> per_set;
  std::map<std::string, WerReport> per_language;
};

DatasetReport dataset_report(const std::vector<EvalItem>& items);

}  // namespace csaug

#endif  // CSAUG_EVAL_H_
