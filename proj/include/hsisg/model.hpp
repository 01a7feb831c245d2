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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hsisg/error.hpp"
#include "hsisg/ngrams.hpp"
#include "hsisg/random.hpp"
#include "hsisg/text_units.hpp"
#include "hsisg/vocab.hpp"

namespace hsisg {

struct TrainConfig {
  std::uint32_t dim = 300;
  std::uint32_t epochs = 5;
  double lr = 0.05;
  std::uint32_t negatives = 5;
  std::uint32_t window = 5;
  double subsample_t = 1e-4;
  std::uint64_t min_count = 5;
  NGramConfig ngram;
  std::uint32_t threads = 1;
  std::uint64_t seed = 42;

  bool operator==(const TrainConfig&) const = default;

  void validate() const {
    if (dim < 1) throw Error(ErrorCode::invalid_argument, "dim must be at least 1");
    if (!(lr > 0)) throw Error(ErrorCode::invalid_argument, "learning rate must be positive");
    if (negatives < 1) throw Error(ErrorCode::invalid_argument, "negatives must be at least 1");
    if (window < 1) throw Error(ErrorCode::invalid_argument, "window must be at least 1");
    if (!(subsample_t > 0 && subsample_t <= 1)) {
      throw Error(ErrorCode::invalid_argument, "sampling threshold must lie in (0, 1]");
    }
    if (threads < 1) throw Error(ErrorCode::invalid_argument, "threads must be at least 1");
    ngram.validate();
  }
};

/// Dense row-major matrix.
template <class Real>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Real(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<Real> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const Real> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<Real> data() { return data_; }
  std::span<const Real> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

/// Input rows hold whole-word and n-gram vectors, output rows hold context
/// vectors (one per vocabulary word).
template <class Real>
struct BasicEmbeddingModel {
  TrainConfig config;
  Vocab vocab;
  Matrix<Real> input;
  Matrix<Real> output;

  std::size_t dim() const { return config.dim; }
  std::size_t vocab_size() const { return vocab.size(); }
  std::size_t buckets() const { return config.ngram.effective_buckets(); }

  /// Units of a token. A bare in-vocabulary surface resolves to the word's
  /// stored unit set (which carries its usual annotation).
  UnitSet units(const AnnotatedToken& token) const {
    if (token.hanja_seqs.empty()) {
      if (auto id = vocab.find(token.surface)) return vocab.entries[*id].units;
    }
    return units_for_word(token, vocab, config.ngram);
  }
};

using EmbeddingModel = BasicEmbeddingModel<float>;

/// Input rows uniform in (-1/d, 1/d), output rows zero.
template <class Real = float>
BasicEmbeddingModel<Real> initialize_model(Vocab vocab, const TrainConfig& config) {
  config.validate();
  BasicEmbeddingModel<Real> model;
  model.config = config;
  model.vocab = std::move(vocab);
  const std::size_t v = model.vocab.size();
  model.input = Matrix<Real>(v + model.buckets(), config.dim);
  model.output = Matrix<Real>(v, config.dim);
  Rng rng(config.seed);
  const double scale = 1.0 / config.dim;
  for (auto& x : model.input.data()) x = static_cast<Real>((2.0 * rng.uniform01() - 1.0) * scale);
  return model;
}

struct ComposedVector {
  std::vector<double> values;
  bool empty = false;  // no extractable units; values are all zero
};

/// Sum of the input rows over the token's units, accumulated in 64-bit.
template <class Real>
ComposedVector word_vector(const BasicEmbeddingModel<Real>& model, const AnnotatedToken& token) {
  const UnitSet units = model.units(token);
  ComposedVector out{std::vector<double>(model.dim(), 0.0), units.empty()};
  for (UnitId u : units.ids) {
    const auto row = model.input.row(u);
    for (std::size_t k = 0; k < row.size(); ++k) out.values[k] += static_cast<double>(row[k]);
  }
  return out;
}

template <class Real>
ComposedVector word_vector(const BasicEmbeddingModel<Real>& model, const std::string& surface) {
  return word_vector(model, AnnotatedToken{surface, {}});
}

}  // namespace hsisg
