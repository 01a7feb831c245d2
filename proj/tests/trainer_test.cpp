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


#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hsisg/trainer.hpp"

namespace hsisg {
namespace {

TrainConfig small_config(NGramConfig ngram = NGramConfig::sisg_cjh3()) {
  TrainConfig c;
  c.dim = 8;
  c.epochs = 2;
  c.min_count = 1;
  c.subsample_t = 1.0;
  c.ngram = ngram;
  c.ngram.bucket_size = 1000;
  return c;
}

std::string template_corpus(std::size_t sentences, std::uint64_t seed) {
  const std::vector<std::string> subjects{"학생|學生", "선생|先生", "사람", "아이", "국가|國家"};
  const std::vector<std::string> verbs{"간다", "온다", "본다", "먹는다", "읽는다"};
  const std::vector<std::string> objects{"학교|學校", "책", "밥", "사회|社會", "나라"};
  std::mt19937_64 gen(seed);
  std::string text;
  for (std::size_t i = 0; i < sentences; ++i) {
    text += subjects[gen() % subjects.size()] + " 이 " + objects[gen() % objects.size()] + " 을 " +
            verbs[gen() % verbs.size()] + "\n";
  }
  return text;
}

TEST(BuildVocab, CountsAndThreshold) {
  const auto corpus = Corpus::from_text("가 가 나");
  const auto v1 = build_vocab(corpus, 1, NGramConfig::sg());
  ASSERT_EQ(v1.size(), 2u);
  EXPECT_EQ(v1.entries[0].surface, "가");
  EXPECT_EQ(v1.entries[0].count, 2u);
  EXPECT_EQ(v1.entries[1].count, 1u);
  EXPECT_EQ(v1.total_tokens, 3u);
  EXPECT_EQ(build_vocab(corpus, 2, NGramConfig::sg()).size(), 1u);
}

TEST(BuildVocab, TiesAreLexicographic) {
  const auto v = build_vocab(Corpus::from_text("다 나 가 다"), 1, NGramConfig::sg());
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v.entries[0].surface, "다");
  EXPECT_EQ(v.entries[1].surface, "가");
  EXPECT_EQ(v.entries[2].surface, "나");
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v.find(v.entries[i].surface), UnitId(i));
}

TEST(BuildVocab, EmptyCorpus) {
  for (const char* text : {"", "\n\n", "   \n"}) {
    try {
      build_vocab(Corpus::from_text(text), 1, NGramConfig::sg());
      FAIL() << "accepted empty corpus";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::empty_corpus);
    }
  }
  EXPECT_THROW(build_vocab(Corpus::from_text("가 나"), 5, NGramConfig::sg()), Error);
}

TEST(BuildVocab, TotalMatchesIndependentCount) {
  const std::string text = template_corpus(2000, 1) + "a\tb\r\n";
  std::istringstream in(text);
  std::uint64_t words = 0;
  for (std::string w; in >> w;) ++words;
  EXPECT_EQ(build_vocab(Corpus::from_text(text), 1, NGramConfig::sg()).total_tokens, words);
}

TEST(BuildVocab, CanonicalAnnotationIsMostFrequent) {
  const auto v = build_vocab(Corpus::from_text("사회|社會 사회|社會 사회|四回 사회 사회 사회"), 1,
                             NGramConfig::sisg_cjh3());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.entries[0].count, 6u);
  EXPECT_TRUE(v.entries[0].hanja_seqs.empty());  // unannotated is the most frequent form
  EXPECT_EQ(v.forms, (std::vector<std::string>{"사회", "사회|四回", "사회|社會"}));
  EXPECT_FALSE(v.hanja_ngrams.empty());
}

TEST(BuildVocab, UnitsPrecomputed) {
  const auto config = NGramConfig::sisg_cj();
  const auto v = build_vocab(Corpus::from_text("가 나 가"), 1, config);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(v.entries[i].units, units_for_word(v.entries[i].token(), UnitId(i), v.size(), config));
  }
}

TEST(WordVector, InVocabularyWithZeroNgramRows) {
  auto config = small_config(NGramConfig::sisg_c());
  auto model = initialize_model<double>(build_vocab(Corpus::from_text("가 나"), 1, config.ngram), config);
  for (std::size_t r = model.vocab_size(); r < model.input.rows(); ++r) {
    for (auto& x : model.input.row(r)) x = 0;
  }
  const auto id = *model.vocab.find("나");
  const auto vec = word_vector(model, "나");
  for (std::size_t k = 0; k < model.dim(); ++k) EXPECT_EQ(vec.values[k], model.input.row(id)[k]);
}

TEST(WordVector, OutOfVocabularyIsNgramSum) {
  auto config = small_config(NGramConfig::sisg_cj());
  const auto model = initialize_model<double>(build_vocab(Corpus::from_text("가 나"), 1, config.ngram), config);
  const AnnotatedToken token{"바다", {}};
  const auto units = units_for_word(token, std::nullopt, model.vocab_size(), config.ngram);
  std::vector<double> expected(model.dim(), 0.0);
  for (UnitId u : units.ids) {
    ASSERT_GE(u, model.vocab_size());
    for (std::size_t k = 0; k < model.dim(); ++k) expected[k] += model.input.row(u)[k];
  }
  const auto vec = word_vector(model, token);
  EXPECT_FALSE(vec.empty);
  for (std::size_t k = 0; k < model.dim(); ++k) EXPECT_EQ(vec.values[k], expected[k]);
}

TEST(WordVector, NoUnitsGivesFlaggedZero) {
  const auto config = small_config(NGramConfig::sg());
  const auto model = initialize_model<double>(build_vocab(Corpus::from_text("가 나"), 1, config.ngram), config);
  const auto vec = word_vector(model, "바다");
  EXPECT_TRUE(vec.empty);
  for (double x : vec.values) EXPECT_EQ(x, 0.0);
}

TEST(WordVector, AnnotatedLookupAddsHanjaUnits) {
  const auto config = small_config();
  const auto model =
      initialize_model<double>(build_vocab(Corpus::from_text("사회|社會 나"), 1, config.ngram), config);
  const auto bare = model.units(AnnotatedToken{"사회", {}});
  const auto annotated = model.units(AnnotatedToken{"사회", {"社會"}});
  EXPECT_EQ(bare, annotated);  // the stored annotation is used for a bare lookup
  const auto other = model.units(AnnotatedToken{"사회", {"四回"}});
  EXPECT_NE(other, annotated);
}

TEST(Initialize, ShapesAndRanges) {
  const auto config = small_config();
  const auto model = initialize_model(build_vocab(Corpus::from_text("가 나 다"), 1, config.ngram), config);
  EXPECT_EQ(model.input.rows(), 3u + 1000u);
  EXPECT_EQ(model.output.rows(), 3u);
  for (float x : model.input.data()) EXPECT_LE(std::abs(x), 1.0f / 8);
  for (float x : model.output.data()) EXPECT_EQ(x, 0.0f);
  const auto sg = initialize_model(build_vocab(Corpus::from_text("가 나 다"), 1, NGramConfig::sg()),
                                   small_config(NGramConfig::sg()));
  EXPECT_EQ(sg.input.rows(), 3u);
}

TEST(Train, SmokeIsDeterministic) {
  const auto corpus = Corpus::from_text("가 나");
  auto config = small_config();
  config.epochs = 1;
  const auto a = train(corpus, config);
  const auto b = train(corpus, config);
  EXPECT_EQ(a.model.input, b.model.input);
  EXPECT_EQ(a.model.output, b.model.output);
  ASSERT_EQ(a.stats.epoch_loss.size(), 1u);
  EXPECT_TRUE(std::isfinite(a.stats.epoch_loss[0]));
  EXPECT_GT(a.stats.epoch_pairs[0], 0u);
}

TEST(Train, SeedChangesResult) {
  const auto corpus = Corpus::from_text(template_corpus(50, 2));
  auto config = small_config();
  const auto a = train(corpus, config);
  config.seed = 43;
  const auto b = train(corpus, config);
  EXPECT_NE(a.model.input, b.model.input);
}

TEST(Train, LossDecreasesOnTemplateCorpus) {
  const auto corpus = Corpus::from_text(template_corpus(1000, 3));
  for (const auto& ngram : {NGramConfig::sg(), NGramConfig::sisg_c(), NGramConfig::sisg_cj(),
                            NGramConfig::sisg_cjh3()}) {
    auto config = small_config(ngram);
    config.dim = 20;
    config.epochs = 5;
    config.subsample_t = 1e-2;
    const auto r = train(corpus, config);
    EXPECT_LT(r.stats.epoch_loss.back(), r.stats.epoch_loss.front()) << ngram.granularities.to_string();
  }
}

TEST(Train, MultiThreadedRunStaysFinite) {
  const auto corpus = Corpus::from_text(template_corpus(2000, 4));
  auto config = small_config();
  config.threads = 4;
  config.epochs = 3;
  config.subsample_t = 1e-2;
  const auto r = train(corpus, config);
  for (float x : r.model.input.data()) ASSERT_TRUE(std::isfinite(x));
  for (float x : r.model.output.data()) ASSERT_TRUE(std::isfinite(x));
  std::istringstream in(template_corpus(2000, 4));
  std::uint64_t words = 0;
  for (std::string w; in >> w;) ++words;
  EXPECT_EQ(r.stats.tokens_read, words * config.epochs);  // partitions cover every line once
}

TEST(Train, StopFlagInterrupts) {
  const auto corpus = Corpus::from_text(template_corpus(100, 5));
  std::atomic<bool> stop{true};
  TrainOptions options;
  options.stop = &stop;
  const auto r = train(corpus, small_config(), options);
  EXPECT_TRUE(r.stats.interrupted);
}

TEST(Train, DivergenceIsReported) {
  const auto corpus = Corpus::from_text(template_corpus(200, 6));
  auto config = small_config(NGramConfig::sg());
  auto model = initialize_model(build_vocab(corpus, 1, config.ngram), config);
  model.input.row(0)[0] = INFINITY;
  try {
    train_model(model, corpus);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::numerical_divergence);
  }
}

TEST(Degeneracy, PlainSkipGramScoreIsSingleDot) {
  const auto config = small_config(NGramConfig::sg());
  const auto r = train(Corpus::from_text(template_corpus(100, 7)), config);
  const auto& m = r.model;
  for (UnitId w = 0; w < m.vocab_size(); ++w) {
    const auto units = m.vocab.entries[w].units;
    ASSERT_EQ(units.ids, std::vector<UnitId>{w});
    for (UnitId c = 0; c < m.vocab_size(); ++c) {
      float expected = 0;
      for (std::size_t k = 0; k < m.dim(); ++k) expected += m.input.row(w)[k] * m.output.row(c)[k];
      ASSERT_EQ(score(units, c, m), expected);
    }
  }
}

}  // namespace
}  // namespace hsisg
