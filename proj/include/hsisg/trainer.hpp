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

// Corpus-level training loop.
//
// Workers own disjoint byte ranges of the corpus and update the shared
// matrices without locks (lost updates are tolerated). With one thread and a
// fixed seed the run is bit-reproducible.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "hsisg/error.hpp"
#include "hsisg/model.hpp"
#include "hsisg/random.hpp"
#include "hsisg/sgd.hpp"
#include "hsisg/text_units.hpp"
#include "hsisg/vocab.hpp"

namespace hsisg {

struct TrainOptions {
  const std::atomic<bool>* stop = nullptr;  // polled once per sentence
};

struct TrainStats {
  std::vector<double> epoch_loss;  // mean loss per (target, context) pair
  std::vector<std::uint64_t> epoch_pairs;
  std::uint64_t tokens_read = 0;
  bool interrupted = false;
};

namespace detail {

inline constexpr std::uint64_t kDivergenceCheckInterval = 1'000'000;

struct TokenForm {
  UnitId word;
  std::vector<UnitId> units;
};

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
};

struct TrainingPlan {
  std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> form_index;
  std::vector<TokenForm> forms;
  std::vector<double> keep_prob;  // per word id
  NegativeTable negatives;
  std::uint64_t planned_updates = 0;
};

template <class Real>
TrainingPlan make_plan(const BasicEmbeddingModel<Real>& model) {
  const auto& vocab = model.vocab;
  TrainingPlan plan;
  plan.forms.reserve(vocab.forms.size());
  for (const auto& raw : vocab.forms) {
    const auto token = parse_annotated_token(raw);
    const auto id = vocab.find(token.surface);
    if (!id) continue;
    // Each occurrence contributes the Hanja units of its own annotation.
    auto units = units_for_word(token, id, vocab.size(), model.config.ngram);
    plan.form_index.emplace(raw, static_cast<std::uint32_t>(plan.forms.size()));
    plan.forms.push_back({*id, std::move(units.ids)});
  }
  std::vector<std::uint64_t> counts;
  counts.reserve(vocab.size());
  for (const auto& e : vocab.entries) {
    counts.push_back(e.count);
    plan.keep_prob.push_back(subsample_keep_prob(e.count, vocab.total_tokens, model.config.subsample_t));
  }
  plan.negatives = NegativeTable(counts);
  plan.planned_updates = static_cast<std::uint64_t>(model.config.epochs) * vocab.total_tokens;
  return plan;
}

struct EpochTally {
  double loss = 0;
  std::uint64_t pairs = 0;
};

template <class Real>
void check_finite_rows(const Matrix<Real>& m, std::span<const UnitId> rows, std::uint64_t step) {
  for (UnitId r : rows) {
    for (Real x : m.row(r)) {
      if (!std::isfinite(x)) {
        throw Error(ErrorCode::numerical_divergence, "non-finite parameter at step " + std::to_string(step), step);
      }
    }
  }
}

template <class Real>
void check_finite(const Matrix<Real>& m, std::uint64_t step) {
  for (Real x : m.data()) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::numerical_divergence, "non-finite parameter at step " + std::to_string(step), step);
    }
  }
}

template <class Real>
void run_worker(BasicEmbeddingModel<Real>& model, const Corpus& corpus, const TrainingPlan& plan,
                std::uint64_t begin, std::uint64_t end, std::size_t worker, std::atomic<std::uint64_t>& progress,
                const TrainOptions& options, const std::atomic<bool>* abort, std::vector<EpochTally>& tallies,
                bool& interrupted) {
  const auto& cfg = model.config;
  Rng rng = Rng::for_worker(cfg.seed, worker);
  PairWorkspace<Real> ws(cfg.dim);
  std::vector<UnitId> negatives(cfg.negatives);
  std::vector<std::uint32_t> sentence;     // form indices of kept tokens
  std::vector<std::uint64_t> sentence_k;   // update index of each kept token
  std::string line;
  std::vector<std::string_view> raw;
  std::uint64_t pairs_done = 0;

  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto stream = corpus.open(begin, end);
    EpochTally& tally = tallies[epoch];
    while (stream.next_line(line)) {
      if (options.stop != nullptr && options.stop->load(std::memory_order_relaxed)) {
        interrupted = true;
        return;
      }
      if (abort != nullptr && abort->load(std::memory_order_relaxed)) return;
      sentence.clear();
      sentence_k.clear();
      raw.clear();
      std::size_t cursor = 0;
      std::string_view field;
      while (next_field(line, cursor, field)) raw.push_back(field);
      const std::uint64_t base_k = progress.fetch_add(raw.size(), std::memory_order_relaxed);
      for (std::size_t i = 0; i < raw.size(); ++i) {
        auto it = plan.form_index.find(raw[i]);
        if (it == plan.form_index.end()) continue;
        const auto& form = plan.forms[it->second];
        if (plan.keep_prob[form.word] < 1.0 && rng.uniform01() >= plan.keep_prob[form.word]) continue;
        sentence.push_back(it->second);
        sentence_k.push_back(base_k + i);
      }

      for (std::size_t i = 0; i < sentence.size(); ++i) {
        const auto& target = plan.forms[sentence[i]];
        const Real lr = static_cast<Real>(linear_lr(cfg.lr, sentence_k[i], plan.planned_updates));
        const auto reach = static_cast<std::ptrdiff_t>(1 + rng.below(cfg.window));
        const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(i) - reach);
        const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(sentence.size()) - 1,
                                                 static_cast<std::ptrdiff_t>(i) + reach);
        for (std::ptrdiff_t c = lo; c <= hi; ++c) {
          if (c == static_cast<std::ptrdiff_t>(i)) continue;
          const UnitId context = plan.forms[sentence[c]].word;
          std::size_t n_neg = 0;
          for (std::uint32_t j = 0; j < cfg.negatives; ++j) {
            if (auto id = plan.negatives.sample_excluding(rng, context)) negatives[n_neg++] = *id;
          }
          tally.loss += static_cast<double>(train_pair<Real>(target.units, context,
                                                             std::span<const UnitId>(negatives.data(), n_neg), lr,
                                                             model.input, model.output, ws, pairs_done));
          ++tally.pairs;
          if (++pairs_done % kDivergenceCheckInterval == 0) {
            check_finite(model.output, pairs_done);
            check_finite_rows(model.input, target.units, pairs_done);
          }
        }
      }
    }
  }
}

}  // namespace detail

/// Runs `config.epochs` passes over the corpus, updating `model` in place.
template <class Real>
TrainStats train_model(BasicEmbeddingModel<Real>& model, const Corpus& corpus, const TrainOptions& options = {}) {
  model.config.validate();
  const auto plan = detail::make_plan(model);
  const std::size_t workers = model.config.threads;
  const std::uint64_t size = corpus.size_bytes();

  std::atomic<std::uint64_t> progress{0};
  std::vector<std::vector<detail::EpochTally>> tallies(workers,
                                                       std::vector<detail::EpochTally>(model.config.epochs));
  std::vector<char> interrupted(workers, 0);

  auto range = [&](std::size_t w) {
    return std::pair<std::uint64_t, std::uint64_t>{size * w / workers, size * (w + 1) / workers};
  };

  if (workers == 1) {
    bool stop = false;
    detail::run_worker(model, corpus, plan, 0, size, 0, progress, options, nullptr, tallies[0], stop);
    interrupted[0] = stop;
  } else {
    std::atomic<bool> abort{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          const auto [b, e] = range(w);
          bool stop = false;
          detail::run_worker(model, corpus, plan, b, e, w, progress, options, &abort, tallies[w], stop);
          interrupted[w] = stop;
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          abort = true;
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  TrainStats stats;
  stats.tokens_read = progress.load();
  for (std::uint32_t e = 0; e < model.config.epochs; ++e) {
    detail::EpochTally sum;
    for (const auto& t : tallies) {
      sum.loss += t[e].loss;
      sum.pairs += t[e].pairs;
    }
    stats.epoch_loss.push_back(sum.pairs > 0 ? sum.loss / static_cast<double>(sum.pairs) : 0.0);
    stats.epoch_pairs.push_back(sum.pairs);
  }
  for (char i : interrupted) stats.interrupted = stats.interrupted || i != 0;
  return stats;
}

template <class Real = float>
struct TrainResult {
  BasicEmbeddingModel<Real> model;
  TrainStats stats;
};

/// Vocabulary, random initialisation and training in one call.
template <class Real = float>
TrainResult<Real> train(const Corpus& corpus, const TrainConfig& config, const TrainOptions& options = {}) {
  config.validate();
  auto model = initialize_model<Real>(build_vocab(corpus, config.min_count, config.ngram), config);
  auto stats = train_model(model, corpus, options);
  return {std::move(model), std::move(stats)};
}

}  // namespace hsisg
