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

// Negative-sampling skip-gram step. The score of a (word, context) pair is the
// sum over the word's units u of input[u] . output[context]; with only the
// whole-word unit this is plain skip-gram, with character / jamo / Hanja
// n-grams it is the corresponding subword model.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsisg/error.hpp"
#include "hsisg/model.hpp"
#include "hsisg/ngrams.hpp"
#include "hsisg/random.hpp"

namespace hsisg {

template <class Real>
Real sigmoid(Real x) {
  if (x >= 0) return Real(1) / (Real(1) + std::exp(-x));
  const Real e = std::exp(x);
  return e / (Real(1) + e);
}

/// log(1 + e^{-x}), stable for large |x|.
template <class Real>
Real logistic_loss(Real x) {
  if (x >= 0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

/// Keep probability of a token with corpus frequency count/total.
inline double subsample_keep_prob(std::uint64_t count, std::uint64_t total, double t) {
  const double f = static_cast<double>(count) / static_cast<double>(total);
  const double r = t / f;
  return std::min(1.0, std::sqrt(r) + r);
}

/// Learning rate at update k of K planned updates.
inline double linear_lr(double lr, std::uint64_t k, std::uint64_t total) {
  if (total == 0) return lr;
  return std::max(0.0, lr * (1.0 - static_cast<double>(k) / static_cast<double>(total)));
}

/// Walker alias table over word ids with P(i) proportional to count_i^power.
class NegativeTable {
 public:
  static constexpr double kPower = 0.75;

  NegativeTable() = default;
  explicit NegativeTable(std::span<const std::uint64_t> counts, double power = kPower) {
    const std::size_t n = counts.size();
    if (n == 0) throw Error(ErrorCode::invalid_argument, "negative table needs at least one word");
    probs_.resize(n);
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      probs_[i] = std::pow(static_cast<double>(counts[i]), power);
      sum += probs_[i];
    }
    for (auto& p : probs_) p /= sum;

    accept_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = probs_[i] * static_cast<double>(n);
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      const auto s = small.back();
      small.pop_back();
      const auto l = large.back();
      accept_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (auto i : large) accept_[i] = 1.0;
    for (auto i : small) accept_[i] = 1.0;  // leftovers from rounding
  }

  std::size_t size() const { return probs_.size(); }
  double probability(std::size_t i) const { return probs_[i]; }

  UnitId sample(Rng& rng) const {
    const auto column = static_cast<UnitId>(rng.below(probs_.size()));
    return rng.uniform01() < accept_[column] ? column : alias_[column];
  }

  /// Draw that never returns `exclude`; nullopt when it is the only word.
  std::optional<UnitId> sample_excluding(Rng& rng, UnitId exclude) const {
    if (probs_.size() < 2) return std::nullopt;
    while (true) {
      const UnitId id = sample(rng);
      if (id != exclude) return id;
    }
  }

 private:
  std::vector<double> probs_;
  std::vector<double> accept_;
  std::vector<UnitId> alias_;
};

/// Sum of the input rows of `units` into `hidden`.
template <class Real>
void accumulate_hidden(const Matrix<Real>& input, std::span<const UnitId> units, std::span<Real> hidden) {
  std::fill(hidden.begin(), hidden.end(), Real(0));
  for (UnitId u : units) {
    const auto row = input.row(u);
    for (std::size_t k = 0; k < hidden.size(); ++k) hidden[k] += row[k];
  }
}

template <class Real>
Real dot(std::span<const Real> a, std::span<const Real> b) {
  Real s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

template <class Real>
Real score(std::span<const UnitId> units, UnitId context, const BasicEmbeddingModel<Real>& model) {
  std::vector<Real> hidden(model.dim());
  accumulate_hidden<Real>(model.input, units, hidden);
  return dot<Real>(hidden, model.output.row(context));
}

template <class Real>
Real score(const UnitSet& units, UnitId context, const BasicEmbeddingModel<Real>& model) {
  return score<Real>(std::span<const UnitId>(units.ids), context, model);
}

/// Scratch buffers for train_pair, reused across steps.
template <class Real>
struct PairWorkspace {
  std::vector<Real> hidden;
  std::vector<Real> grad;
  std::vector<Real> coeffs;

  explicit PairWorkspace(std::size_t dim = 0) : hidden(dim), grad(dim) {}
};

/// One SGD step on L(s(w,c)) + sum_j L(-s(w,j)); returns the loss before the
/// update. Every gradient is taken at the pre-step parameters.
template <class Real>
Real train_pair(std::span<const UnitId> units, UnitId context, std::span<const UnitId> negatives, Real lr,
                Matrix<Real>& input, Matrix<Real>& output, PairWorkspace<Real>& ws, std::uint64_t step = 0) {
  const std::size_t dim = input.cols();
  ws.hidden.resize(dim);
  ws.grad.assign(dim, Real(0));
  ws.coeffs.resize(negatives.size() + 1);
  accumulate_hidden<Real>(input, units, ws.hidden);

  Real loss = 0;
  for (std::size_t i = 0; i <= negatives.size(); ++i) {
    const bool positive = i == 0;
    const UnitId target = positive ? context : negatives[i - 1];
    const auto out = output.row(target);
    const Real s = dot<Real>(ws.hidden, out);
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::numerical_divergence, "non-finite score at step " + std::to_string(step), step);
    }
    const Real g = sigmoid(s) - (positive ? Real(1) : Real(0));
    loss += logistic_loss(positive ? s : -s);
    ws.coeffs[i] = g;
    for (std::size_t k = 0; k < dim; ++k) ws.grad[k] += g * out[k];
  }
  for (std::size_t i = 0; i <= negatives.size(); ++i) {
    auto out = output.row(i == 0 ? context : negatives[i - 1]);
    const Real step_scale = -lr * ws.coeffs[i];
    for (std::size_t k = 0; k < dim; ++k) out[k] += step_scale * ws.hidden[k];
  }
  for (UnitId u : units) {
    auto row = input.row(u);
    for (std::size_t k = 0; k < dim; ++k) row[k] -= lr * ws.grad[k];
  }
  return loss;
}

template <class Real>
Real train_pair(const UnitSet& units, UnitId context, std::span<const UnitId> negatives, Real lr,
                BasicEmbeddingModel<Real>& model) {
  PairWorkspace<Real> ws(model.dim());
  return train_pair<Real>(units.ids, context, negatives, lr, model.input, model.output, ws);
}

}  // namespace hsisg
