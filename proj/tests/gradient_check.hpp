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


// Finite-difference check of the per-pair SGD step. The loss is recomputed
// here from scratch; the analytic gradient is read off the update applied by
// train_pair with lr = 1.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hsisg/sgd.hpp"

namespace hsisg::oracle {

struct PairInstance {
  Matrix<double> input;
  Matrix<double> output;
  std::vector<UnitId> units;
  UnitId context = 0;
  std::vector<UnitId> negatives;
};

inline PairInstance random_instance(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> value(-0.8, 0.8);
  PairInstance p;
  const std::size_t d = 1 + gen() % 8;
  const std::size_t v = 2 + gen() % 11;
  const std::size_t b = 1 + gen() % 10;
  p.input = Matrix<double>(v + b, d);
  p.output = Matrix<double>(v, d);
  for (auto& x : p.input.data()) x = value(gen);
  for (auto& x : p.output.data()) x = value(gen);

  std::vector<UnitId> all(v + b);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<UnitId>(i);
  std::shuffle(all.begin(), all.end(), gen);
  all.resize(1 + gen() % std::min<std::size_t>(10, all.size()));
  p.units = all;

  p.context = static_cast<UnitId>(gen() % v);
  const std::size_t k = gen() % 6;
  while (p.negatives.size() < k) {
    const auto id = static_cast<UnitId>(gen() % v);
    if (id != p.context) p.negatives.push_back(id);
  }
  return p;
}

inline double pair_loss(const PairInstance& p) {
  const std::size_t d = p.input.cols();
  std::vector<double> h(d, 0.0);
  for (UnitId u : p.units) {
    for (std::size_t k = 0; k < d; ++k) h[k] += p.input.row(u)[k];
  }
  auto s = [&](UnitId c) {
    double acc = 0;
    for (std::size_t k = 0; k < d; ++k) acc += h[k] * p.output.row(c)[k];
    return acc;
  };
  double loss = std::log1p(std::exp(-s(p.context)));
  for (UnitId j : p.negatives) loss += std::log1p(std::exp(s(j)));
  return loss;
}

struct GradientCheck {
  double relative_error = 0;
  double loss_error = 0;  // |train_pair loss - oracle loss|
};

inline GradientCheck check_gradient(const PairInstance& p, double eps = 1e-5) {
  PairInstance stepped = p;
  PairWorkspace<double> ws;
  const double loss = train_pair<double>(stepped.units, stepped.context, stepped.negatives, 1.0, stepped.input,
                                         stepped.output, ws);

  double diff2 = 0, analytic2 = 0, numeric2 = 0;
  auto visit = [&](Matrix<double> PairInstance::*which) {
    const auto& before = p.*which;
    const auto& after = stepped.*which;
    PairInstance probe = p;
    const auto data = (probe.*which).data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double analytic = before.data()[i] - after.data()[i];
      const double saved = data[i];
      data[i] = saved + eps;
      const double up = pair_loss(probe);
      data[i] = saved - eps;
      const double down = pair_loss(probe);
      data[i] = saved;
      const double numeric = (up - down) / (2 * eps);
      diff2 += (analytic - numeric) * (analytic - numeric);
      analytic2 += analytic * analytic;
      numeric2 += numeric * numeric;
    }
  };
  visit(&PairInstance::input);
  visit(&PairInstance::output);

  GradientCheck out;
  const double scale = std::sqrt(std::max(analytic2, numeric2));
  out.relative_error = scale > 0 ? std::sqrt(diff2) / scale : std::sqrt(diff2);
  out.loss_error = std::abs(loss - pair_loss(p));
  return out;
}

}  // namespace hsisg::oracle
