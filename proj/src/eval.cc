// src/eval.cc

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

#include "csaug/eval.h"

#include <algorithm>
#include <cctype>

#include "csaug/errors.h"

namespace csaug {

std::vector<std::string> tokenize_words(std::string_view text) {
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

std::vector<AlignOp> align_words(const std::vector<std::string>& ref,
                                 const std::vector<std::string>& hyp) {
  const size_t r = ref.size(), h = hyp.size();
  // dist[i][j]: edit distance between ref[0..i) and hyp[0..j).
  std::vector<std::vector<int32_t>> dist(r + 1, std::vector<int32_t>(h + 1, 0));
  for (size_t i = 0; i <= r; ++i) dist[i][0] = int32_t(i);
  for (size_t j = 0; j <= h; ++j) dist[0][j] = int32_t(j);
  for (size_t i = 1; i <= r; ++i) {
    for (size_t j = 1; j <= h; ++j) {
      const int32_t sub = dist[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const int32_t del = dist[i - 1][j] + 1;
      const int32_t ins = dist[i][j - 1] + 1;
      dist[i][j] = std::min({sub, del, ins});
    }
  }

  std::vector<AlignOp> ops;
  ops.reserve(r + h);
  size_t i = r, j = h;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && dist[i][j] == dist[i - 1][j - 1]) {
      ops.push_back(AlignOp::kMatch);
      --i, --j;
    } else if (i > 0 && j > 0 && dist[i][j] == dist[i - 1][j - 1] + 1) {
      ops.push_back(AlignOp::kSub);
      --i, --j;
    } else if (i > 0 && dist[i][j] == dist[i - 1][j] + 1) {
      ops.push_back(AlignOp::kDel);
      --i;
    } else {
      ops.push_back(AlignOp::kIns);
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

WerReport wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  if (ref.empty()) throw DataError("wer: empty reference (undefined metric)");
  WerReport rep;
  rep.ref_words = int64_t(ref.size());
  for (AlignOp op : align_words(ref, hyp)) {
    switch (op) {
      case AlignOp::kMatch: rep.hits += 1; break;
      case AlignOp::kSub: rep.substitutions += 1; break;
      case AlignOp::kDel: rep.deletions += 1; break;
      case AlignOp::kIns: rep.insertions += 1; break;
    }
  }
  return rep;
}

double embedded_accuracy(const std::vector<TaggedWord>& ref,
                         const std::vector<std::string>& hyp,
                         const std::string& target_lang) {
  std::vector<std::string> ref_words;
  ref_words.reserve(ref.size());
  int64_t tagged = 0;
  for (const auto& w : ref) {
    ref_words.push_back(w.word);
    if (w.lang == target_lang) ++tagged;
  }
  if (tagged == 0) {
    throw DataError("embedded_accuracy: no reference words tagged \"" + target_lang +
                    "\" (undefined metric)");
  }

  int64_t correct = 0;
  size_t i = 0;
  for (AlignOp op : align_words(ref_words, hyp)) {
    switch (op) {
      case AlignOp::kMatch:
        if (ref[i].lang == target_lang) ++correct;
        ++i;
        break;
      case AlignOp::kSub:
      case AlignOp::kDel:
        ++i;
        break;
      case AlignOp::kIns:
        break;
    }
  }
  return 100.0 * double(correct) / double(tagged);
}

DatasetReport dataset_report(const std::vector<EvalItem>& items) {
  DatasetReport report;
  auto add = [](WerReport& agg, const WerReport& one) {
    agg.substitutions += one.substitutions;
    agg.insertions += one.insertions;
    agg.deletions += one.deletions;
    agg.hits += one.hits;
    agg.ref_words += one.ref_words;
  };
  for (const auto& item : items) {
    const WerReport one = wer(tokenize_words(item.ref_text), tokenize_words(item.hyp_text));
    add(report.overall, one);
    if (!item.set_name.empty()) add(report.per_set[item.set_name], one);
    if (!item.lang.empty()) add(report.per_language[item.lang], one);
  }
  return report;
}

}  // namespace csaug
