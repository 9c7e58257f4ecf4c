// tests/test_bpe.cc

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

#include <map>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "csaug/errors.h"
#include "csaug/rng.h"
#include "test_util.h"

using namespace csaug;

namespace {

// Independent pair counter over marker-prefixed words: every adjacent
// occurrence counts, overlaps included. Used as the oracle for "the first
// merge is the most frequent pair".
std::map<std::pair<std::string, std::string>, int64_t> brute_force_pair_counts(
    const std::string& text) {
  std::map<std::pair<std::string, std::string>, int64_t> counts;
  std::istringstream in(text);
  std::string word;
  while (in >> word) {
    std::vector<std::string> syms;
    syms.push_back(kWordMarker);
    for (const auto& cp : utf8_code_points(word)) syms.push_back(cp);
    for (size_t i = 0; i + 1 < syms.size(); ++i) {
      counts[{syms[i], syms[i + 1]}] += 1;
    }
  }
  return counts;
}

std::pair<std::string, std::string> most_frequent_pair(
    const std::map<std::pair<std::string, std::string>, int64_t>& counts) {
  std::pair<std::string, std::string> best;
  int64_t best_count = -1;
  for (const auto& [pair, count] : counts) {
    // std::map iterates in pair-lexicographic order, so on ties the first
    // (smallest) pair sticks.
    if (count > best_count) {
      best = pair;
      best_count = count;
    }
  }
  return best;
}

std::string random_word(Rng& rng, const std::string& alphabet, size_t min_len,
                        size_t max_len) {
  const size_t len = min_len + size_t(rng.below(max_len - min_len + 1));
  std::string w;
  for (size_t i = 0; i < len; ++i) w += alphabet[rng.below(alphabet.size())];
  return w;
}

}  // namespace

TEST_CASE("first merge is the most frequent pair of aaabdaaabac") {
  const std::string corpus = "aaabdaaabac";
  auto counts = brute_force_pair_counts(corpus);
  CHECK(counts[{"a", "a"}] == 4);  // overlaps counted
  CHECK(most_frequent_pair(counts) == std::pair<std::string, std::string>{"a", "a"});

  // base inventory: marker + {a,b,c,d} = 5; +3 specials; +2 merges
  BpeModel model = train_bpe({{"xx", corpus}}, 5 + 3 + 2);
  REQUIRE(model.merges.size() >= 1);
  CHECK(model.merges[0] == MergeRule{"a", "a"});
  CHECK(model.vocab_size() == 10);
}

TEST_CASE("single-character corpus merges chain until exhaustion") {
  // "bbbb": inventory is marker+{b}; merges fuse b-runs and finally the
  // marker, then nothing is left even though budget remains.
  BpeModel model = train_bpe({{"xx", "bbbb"}}, 64);
  REQUIRE(model.merges.size() == 3);
  CHECK(model.merges[0] == MergeRule{"b", "b"});
  CHECK(model.merges[1] == MergeRule{"bb", "bb"});
  CHECK(model.merges[2] == MergeRule{kWordMarker, "bbbb"});
  CHECK(model.vocab_size() == 3 + 2 + 3);
  CHECK(encode(model, "bbbb") == std::vector<int>{model.token_to_id.at(std::string(kWordMarker) + "bbbb")});
}

TEST_CASE("specials hold ids 0..2 and stay out of merges") {
  BpeModel model = train_bpe({{"de", "der die das"}, {"en", "the the cat"}}, 40);
  CHECK(model.id_to_token[0] == kUnkToken);
  CHECK(model.id_to_token[1] == kSosToken);
  CHECK(model.id_to_token[2] == kEosToken);
  for (const auto& rule : model.merges) {
    CHECK(rule.left != kUnkToken);
    CHECK(rule.left != kSosToken);
    CHECK(rule.left != kEosToken);
    CHECK(rule.right != kUnkToken);
    CHECK(rule.right != kSosToken);
    CHECK(rule.right != kEosToken);
  }
  // ids dense 0..|vocab|-1
  std::set<int> ids;
  for (const auto& [token, id] : model.token_to_id) ids.insert(id);
  CHECK(int(ids.size()) == model.vocab_size());
  CHECK(*ids.begin() == 0);
  CHECK(*ids.rbegin() == model.vocab_size() - 1);
}

TEST_CASE("training reaches the configured vocab size exactly") {
  Rng rng(31);
  std::string de, en, ar;
  for (int i = 0; i < 400; ++i) {
    de += random_word(rng, "abcdefgh", 2, 8) + " ";
    en += random_word(rng, "hijklmno", 2, 8) + " ";
    ar += random_word(rng, "pqrstuvw", 2, 8) + " ";
  }
  const int target = 300;
  BpeModel model = train_bpe({{"de", de}, {"en", en}, {"ar", ar}}, target);
  CHECK(model.vocab_size() == target);
  CHECK(model.target_vocab_size == target);
}

TEST_CASE("identical corpora give byte-identical merge lists") {
  Rng rng(77);
  std::string text;
  for (int i = 0; i < 200; ++i) text += random_word(rng, "abcdef", 1, 6) + " ";
  BpeModel a = train_bpe({{"xx", text}}, 80);
  BpeModel b = train_bpe({{"xx", text}}, 80);
  CHECK(a == b);
  CHECK(bpe_to_string(a) == bpe_to_string(b));
}

TEST_CASE("equal text share: only the common prefix matters") {
  // Language corpora are cut to the same code-point count, so extending one
  // corpus beyond the other's length must not change the model.
  const std::string de = "das boot faehrt heute nacht los";
  const std::string en = "the boat leaves late tonite yes";
  REQUIRE(en.size() == de.size());
  BpeModel a = train_bpe({{"de", de}, {"en", en}}, 60);
  BpeModel b = train_bpe({{"de", de}, {"en", en + " extra words that get cut off"}}, 60);
  CHECK(a == b);
}

TEST_CASE("encode/decode round-trip on in-inventory text") {
  BpeModel model =
      train_bpe({{"de", "das war sehr gut und das war auch strange"},
                 {"en", "this is strange and this was very good too ok"}},
                70);
  const std::string phrase = "das war sehr strange";
  CHECK(decode(model, encode(model, phrase)) == phrase);
  CHECK(decode(model, encode(model, "war das gut")) == "war das gut");
}

TEST_CASE("encode basics") {
  BpeModel model = train_bpe({{"xx", "abc abd"}}, 16);
  CHECK(encode(model, "").empty());
  CHECK(encode(model, "  \t \n").empty());

  // unseen character maps to unk
  std::vector<int> ids = encode(model, "abz");
  CHECK(std::count(ids.begin(), ids.end(), kUnkId) == 1);
  // decode of unk renders the literal token
  std::string back = decode(model, ids);
  CHECK(back.find(kUnkToken) != std::string::npos);
}

TEST_CASE("utf-8 code points survive the round trip") {
  const std::string ar = "\xD9\x85\xD8\xB1\xD8\xAD\xD8\xA8\xD8\xA7";  // Arabic
  const std::string de = "gr\xC3\xB6\xC3\x9F\x65";                    // umlauts
  BpeModel model = train_bpe({{"ar", ar + " " + ar}, {"de", de + " " + de}}, 40);
  CHECK(decode(model, encode(model, ar)) == ar);
  CHECK(decode(model, encode(model, de)) == de);
}

TEST_CASE("decode validates ids") {
  BpeModel model = train_bpe({{"xx", "ab ab"}}, 10);
  CHECK(decode(model, std::vector<int>{}) == "");
  CHECK_THROWS_WITH_AS(decode(model, std::vector<int>{model.vocab_size()}),
                       doctest::Contains("out of range"), DataError);
  CHECK_THROWS_AS(decode(model, std::vector<int>{-1}), DataError);
}

TEST_CASE("concat_labels is plain concatenation, no tags") {
  std::vector<int> de_seq{5, 6, 7, 8, 9};
  std::vector<int> en_seq{10, 11, 12, 13};
  std::vector<int> joined = concat_labels({de_seq, en_seq});
  REQUIRE(joined.size() == 9);
  for (size_t i = 0; i < 5; ++i) CHECK(joined[i] == de_seq[i]);
  for (size_t i = 0; i < 4; ++i) CHECK(joined[5 + i] == en_seq[i]);
  // no reserved id was smuggled in as a separator
  for (int id : joined) {
    CHECK(id != kUnkId);
    CHECK(id != kSosId);
    CHECK(id != kEosId);
  }
  CHECK(concat_labels({de_seq}) == de_seq);
  CHECK(concat_labels({}).empty());
}

TEST_CASE("model file round-trip") {
  test::TempDir tmp("bpe-io");
  BpeModel model = train_bpe({{"de", "die katze schlaeft"}, {"en", "the cat sleeps"}}, 64);
  save_bpe(model, tmp.path("bpe.model"));
  BpeModel back = load_bpe(tmp.path("bpe.model"));
  CHECK(back == model);
  CHECK(bpe_to_string(back) == bpe_to_string(model));
  CHECK(decode(back, encode(back, "the cat")) == "the cat");

  test::write_file(tmp.path("bad.model"), "not-a-model 9\n");
  CHECK_THROWS_AS(load_bpe(tmp.path("bad.model")), ConfigError);
}

TEST_CASE("training error paths") {
  CHECK_THROWS_WITH_AS(train_bpe({{"de", "hallo"}, {"en", "   "}}, 100),
                       doctest::Contains("en"), DataError);
  // vocab too small for inventory + specials
  CHECK_THROWS_AS(train_bpe({{"xx", "abcdefghij"}}, 8), ConfigError);
}

TEST_CASE("token attribution is reported per language") {
  std::string de, en;
  for (int i = 0; i < 30; ++i) {
    de += "zug burg haus ";
    en += "the ship dock ";
  }
  de.resize(en.size());
  BpeModel model = train_bpe({{"de", de}, {"en", en}}, 60);
  TokenAttribution attr = attribute_tokens(model, {{"de", de}, {"en", en}});
  CHECK(attr.specials == 3);
  CHECK(attr.tokens_per_language["de"] > 0);
  CHECK(attr.tokens_per_language["en"] > 0);
  CHECK(attr.tokens_per_language["de"] + attr.tokens_per_language["en"] + attr.shared ==
        model.vocab_size() - 3);
}
