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

// Run manifests: `key<TAB>value` lines describing a training run. The
// `config.*` keys alone reconstruct the TrainConfig.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hsisg/error.hpp"
#include "hsisg/io.hpp"
#include "hsisg/model.hpp"
#include "hsisg/trainer.hpp"
#include "hsisg/transfer.hpp"
#include "hsisg/vocab.hpp"

namespace hsisg {

inline KeyValues config_key_values(const TrainConfig& c) {
  return {
      {"config.dim", std::to_string(c.dim)},
      {"config.epochs", std::to_string(c.epochs)},
      {"config.lr", format_exact(c.lr)},
      {"config.negatives", std::to_string(c.negatives)},
      {"config.window", std::to_string(c.window)},
      {"config.subsample_t", format_exact(c.subsample_t)},
      {"config.min_count", std::to_string(c.min_count)},
      {"config.threads", std::to_string(c.threads)},
      {"config.seed", std::to_string(c.seed)},
      {"config.bucket", std::to_string(c.ngram.bucket_size)},
      {"config.granularities", c.ngram.granularities.to_string()},
      {"config.char_min", std::to_string(c.ngram.char_min)},
      {"config.char_max", std::to_string(c.ngram.char_max)},
      {"config.jamo_min", std::to_string(c.ngram.jamo_min)},
      {"config.jamo_max", std::to_string(c.ngram.jamo_max)},
      {"config.hanja_min", std::to_string(c.ngram.hanja_min)},
      {"config.hanja_max", std::to_string(c.ngram.hanja_max)},
  };
}

inline TrainConfig parse_train_config(const KeyValues& kv) {
  auto get = [&](const std::string& key) -> const std::string& {
    for (const auto& [k, v] : kv) {
      if (k == key) return v;
    }
    throw Error(ErrorCode::dataset_parse, "manifest lacks '" + key + "'");
  };
  auto num = [&]<class T>(const std::string& key, T& out) {
    if (!parse_number(get(key), out)) throw Error(ErrorCode::dataset_parse, "manifest value of '" + key + "' is invalid");
  };
  TrainConfig c;
  num("config.dim", c.dim);
  num("config.epochs", c.epochs);
  num("config.lr", c.lr);
  num("config.negatives", c.negatives);
  num("config.window", c.window);
  num("config.subsample_t", c.subsample_t);
  num("config.min_count", c.min_count);
  num("config.threads", c.threads);
  num("config.seed", c.seed);
  num("config.bucket", c.ngram.bucket_size);
  c.ngram.granularities = Granularities::parse(get("config.granularities"));
  num("config.char_min", c.ngram.char_min);
  num("config.char_max", c.ngram.char_max);
  num("config.jamo_min", c.ngram.jamo_min);
  num("config.jamo_max", c.ngram.jamo_max);
  num("config.hanja_min", c.ngram.hanja_min);
  num("config.hanja_max", c.ngram.hanja_max);
  return c;
}

inline KeyValues run_manifest(const TrainConfig& config, const Vocab& vocab, const TrainStats& stats,
                              const std::optional<TransferReport>& transfer) {
  KeyValues kv = config_key_values(config);
  kv.emplace_back("corpus.tokens", std::to_string(vocab.total_tokens));
  kv.emplace_back("corpus.lines", std::to_string(vocab.lines));
  kv.emplace_back("corpus.malformed_tokens", std::to_string(vocab.malformed_tokens));
  kv.emplace_back("vocab.size", std::to_string(vocab.size()));
  kv.emplace_back("vocab.forms", std::to_string(vocab.forms.size()));
  kv.emplace_back("vocab.hanja_ngrams", std::to_string(vocab.hanja_ngrams.size()));
  kv.emplace_back("train.tokens_read", std::to_string(stats.tokens_read));
  for (std::size_t e = 0; e < stats.epoch_loss.size(); ++e) {
    kv.emplace_back("train.epoch" + std::to_string(e + 1) + ".loss", format_exact(stats.epoch_loss[e]));
    kv.emplace_back("train.epoch" + std::to_string(e + 1) + ".pairs", std::to_string(stats.epoch_pairs[e]));
  }
  kv.emplace_back("transfer.enabled", transfer ? "1" : "0");
  if (transfer) {
    kv.emplace_back("transfer.slots_initialized", std::to_string(transfer->slots_initialized));
    kv.emplace_back("transfer.ngrams_matched", std::to_string(transfer->ngrams_matched));
    kv.emplace_back("transfer.ngrams_missed", std::to_string(transfer->ngrams_missed));
    kv.emplace_back("transfer.collisions_detected", std::to_string(transfer->collisions_detected));
    kv.emplace_back("transfer.dim_check", transfer->dim_check ? "pass" : "fail");
    for (const auto& [len, n] : transfer->matched_by_length) {
      kv.emplace_back("transfer.matched_length" + std::to_string(len), std::to_string(n));
    }
  }
  return kv;
}

}  // namespace hsisg
