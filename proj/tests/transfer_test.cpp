// Copyright 2026 The hsisg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hsisg/transfer.hpp"
#include "hsisg/vocab.hpp"

namespace hsisg {
namespace {

const std::string kBoh = "\xEE\x80\x83";  // U+E003
const std::string kEoh = "\xEE\x80\x84";  // U+E004

PretrainedLexicon lexicon_of(const std::string& text) {
  std::istringstream in(text);
  return parse_pretrained(in);
}

CharMapping mapping_of(const std::string& text) {
  std::istringstream in(text);
  return parse_char_mapping(in);
}

BasicEmbeddingModel<float> model_with(std::uint64_t buckets, std::uint32_t dim = 2) {
  TrainConfig c;
  c.dim = dim;
  c.min_count = 1;
  c.ngram.bucket_size = buckets;
  return initialize_model(build_vocab(Corpus::from_text("사회|社會 형|型 가"), 1, c.ngram), c);
}

TEST(LoadPretrained, Basic) {
  const auto lex = lexicon_of("1 2\n社 0.5 -0.5\n");
  EXPECT_EQ(lex.dim, 2u);
  ASSERT_EQ(lex.vectors.size(), 1u);
  EXPECT_EQ(lex.vectors.at("社"), (std::vector<float>{0.5f, -0.5f}));
}

TEST(LoadPretrained, TruncatedAndDuplicates) {
  try {
    lexicon_of("2 2\n社 0.5 -0.5\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::truncated_lexicon);
  }
  const auto lex = lexicon_of("2 1\n社 1\n社 2\n");
  EXPECT_EQ(lex.vectors.size(), 1u);
  EXPECT_EQ(lex.duplicate_keys, 1u);
  EXPECT_EQ(lex.vectors.at("社")[0], 2.0f);  // last wins
}

TEST(CharMapping, ParseAndApply) {
  const auto m = mapping_of("# traditional -> simplified\n會\t会\n\n國\t国\r\n社\t社\n");
  EXPECT_EQ(m.table.size(), 3u);
  EXPECT_EQ(to_simplified("社會", m), "社会");
  EXPECT_EQ(to_simplified("型", m), "型");
  EXPECT_EQ(to_simplified("", m), "");
  EXPECT_EQ(to_simplified(kBoh + "國", m), kBoh + "国");
}

TEST(CharMapping, Malformed) {
  for (const char* bad : {"會会\n", "會\t会\t\n", "會會\t会\n", "a\tb\n", "會\t\n"}) {
    try {
      mapping_of(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::malformed_mapping) << bad;
      EXPECT_EQ(e.detail(), 1u);
    }
  }
}

TEST(InitHanjaSlots, CopiesExactlyAndStripsMarkers) {
  auto model = model_with(1000);
  const auto before = model.input;
  const auto lex = lexicon_of("2 2\n型 0.125 -3.5\n社会 7 8\n");
  const auto map = mapping_of("會\t会\n");
  const std::vector<std::string> ngrams{"型", kBoh + "型", "型" + kEoh, "社會", "社", "會"};
  const auto report = init_hanja_slots(model, lex, map, ngrams);

  const std::uint64_t v = model.vocab_size();
  EXPECT_TRUE(report.dim_check);
  EXPECT_EQ(report.ngrams_matched + report.ngrams_missed, ngrams.size());
  EXPECT_EQ(report.ngrams_matched, 4u);  // three forms of 型, plus 社會 via 社会
  EXPECT_EQ(report.ngrams_missed, 2u);
  EXPECT_EQ(report.collisions_detected + report.slots_initialized, report.ngrams_matched);

  for (const auto& g : {std::string("型"), kBoh + "型", "型" + kEoh}) {
    const auto row = model.input.row(ngram_slot(g, v, 1000));
    EXPECT_EQ(row[0], 0.125f) << g;
    EXPECT_EQ(row[1], -3.5f) << g;
  }
  const auto row = model.input.row(ngram_slot("社會", v, 1000));
  EXPECT_EQ(row[0], 7.0f);
  EXPECT_EQ(row[1], 8.0f);
  EXPECT_EQ(report.matched_by_length.at(1), 1u);
  EXPECT_EQ(report.matched_by_length.at(2), 3u);

  std::vector<UnitId> written;
  for (const auto& g : {std::string("型"), kBoh + "型", "型" + kEoh, std::string("社會")}) {
    written.push_back(ngram_slot(g, v, 1000));
  }
  for (std::size_t r = 0; r < model.input.rows(); ++r) {
    if (std::find(written.begin(), written.end(), r) != written.end()) continue;
    for (std::size_t k = 0; k < 2; ++k) ASSERT_EQ(model.input.row(r)[k], before.row(r)[k]) << "row " << r;
  }
}

TEST(InitHanjaSlots, CollisionKeepsFirstInSortedOrder) {
  auto model = model_with(1);  // every n-gram shares the single bucket
  const auto lex = lexicon_of("2 2\n國 1 1\n型 2 2\n");
  const std::vector<std::string> ngrams{"型", "國"};
  const auto report = init_hanja_slots(model, lex, CharMapping{}, ngrams);
  EXPECT_EQ(report.ngrams_matched, 2u);
  EXPECT_EQ(report.collisions_detected, 1u);
  EXPECT_EQ(report.slots_initialized, 1u);
  const std::string first = std::min(std::string("型"), std::string("國"));
  const float expected = first == "國" ? 1.0f : 2.0f;
  EXPECT_EQ(model.input.row(model.vocab_size())[0], expected);
}

TEST(InitHanjaSlots, DimMismatchLeavesModelUntouched) {
  auto model = model_with(100, 3);
  const auto before = model.input;
  try {
    init_hanja_slots(model, lexicon_of("1 2\n型 1 2\n"), CharMapping{}, std::vector<std::string>{"型"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dim_mismatch);
  }
  EXPECT_EQ(model.input, before);
}

TEST(InitHanjaSlots, EmptyInputsChangeNothing) {
  auto model = model_with(100);
  const auto before = model.input;
  PretrainedLexicon empty;
  empty.dim = 2;
  const auto r1 = init_hanja_slots(model, empty, CharMapping{}, model.vocab.hanja_ngrams);
  EXPECT_EQ(r1.ngrams_matched, 0u);
  EXPECT_EQ(r1.ngrams_missed, model.vocab.hanja_ngrams.size());
  const auto r2 = init_hanja_slots(model, lexicon_of("1 2\n型 1 2\n"), CharMapping{}, std::vector<std::string>{});
  EXPECT_EQ(r2.ngrams_matched + r2.ngrams_missed + r2.slots_initialized + r2.collisions_detected, 0u);
  EXPECT_EQ(model.input, before);
}

TEST(InitHanjaSlots, IdempotentAndInsideBuckets) {
  auto a = model_with(7);
  auto b = model_with(7);
  const auto lex = lexicon_of("4 2\n社 1 2\n会 3 4\n型 5 6\n社会 7 8\n");
  const auto map = mapping_of("會\t会\n");
  const auto& ngrams = a.vocab.hanja_ngrams;
  init_hanja_slots(a, lex, map, ngrams);
  const auto once = a.input;
  init_hanja_slots(a, lex, map, ngrams);
  EXPECT_EQ(a.input, once);
  const auto before = b.input;
  init_hanja_slots(b, lex, map, ngrams);
  for (std::size_t r = 0; r < b.vocab_size(); ++r) {
    for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(b.input.row(r)[k], before.row(r)[k]);
  }
}

}  // namespace
}  // namespace hsisg
