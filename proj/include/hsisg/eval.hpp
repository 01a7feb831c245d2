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

// Intrinsic evaluation in 64-bit arithmetic: mean analogy cosine distance
// (lower is better), Pearson/Spearman similarity correlation and nearest
// neighbours. Words that resolve to no units are skipped and counted.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hsisg/error.hpp"
#include "hsisg/io.hpp"
#include "hsisg/model.hpp"
#include "hsisg/text_units.hpp"

namespace hsisg {

// ---------------------------------------------------------------------------
// Vector sources

/// Anything that maps a word to a vector and can enumerate its vocabulary.
template <class S>
concept VectorSource = requires(const S& s, const std::string& w) {
  { s.lookup(w) } -> std::same_as<ComposedVector>;
  { s.words() } -> std::same_as<std::vector<std::string>>;
};

/// Vectors composed from a trained model. Dataset words may carry an
/// annotation (`word|漢字`); anything unparsable is looked up as a bare surface.
template <class Real>
class ModelVectors {
 public:
  explicit ModelVectors(const BasicEmbeddingModel<Real>& model) : model_(&model) {}

  ComposedVector lookup(const std::string& word) const {
    auto it = cache_.find(word);
    if (it != cache_.end()) return it->second;
    AnnotatedToken token;
    try {
      token = parse_annotated_token(word);
    } catch (const Error&) {
      token = {word, {}};
    }
    auto v = word_vector(*model_, token);
    cache_.emplace(word, v);
    return v;
  }

  std::vector<std::string> words() const {
    std::vector<std::string> out;
    out.reserve(model_->vocab.size());
    for (const auto& e : model_->vocab.entries) out.push_back(e.surface);
    return out;
  }

 private:
  const BasicEmbeddingModel<Real>* model_;
  mutable std::unordered_map<std::string, ComposedVector> cache_;
};

/// Vectors read from a word2vec text file; unknown words resolve to empty. An
/// annotated word (`word|漢字`) missing from the file falls back to its surface.
class VecTable {
 public:
  explicit VecTable(VecFile<double> file) : dim_(file.dim) {
    for (auto& [key, values] : file.rows) {
      if (vectors_.insert_or_assign(key, std::move(values)).second) order_.push_back(key);
    }
  }
  static VecTable load(const std::filesystem::path& path) { return VecTable(load_vec<double>(path)); }

  ComposedVector lookup(const std::string& word) const {
    auto it = vectors_.find(word);
    if (it == vectors_.end()) {
      const auto bar = word.find(kAnnotationDelimiter);
      if (bar != std::string::npos && bar > 0) it = vectors_.find(word.substr(0, bar));
    }
    if (it == vectors_.end()) return {std::vector<double>(dim_, 0.0), true};
    return {it->second, false};
  }
  std::vector<std::string> words() const { return order_; }
  std::uint32_t dim() const { return dim_; }

 private:
  std::uint32_t dim_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
  std::vector<std::string> order_;
};

// ---------------------------------------------------------------------------
// Metrics

inline double norm(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double cosine(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::invalid_argument, "cosine: dimension mismatch");
  double d = 0, sx = 0, sy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    d += x[k] * y[k];
    sx += x[k] * x[k];
    sy += y[k] * y[k];
  }
  if (sx == 0 || sy == 0) throw Error(ErrorCode::zero_vector, "cosine of a zero vector");
  // One square root keeps cos(x, x) at exactly 1, so equal similarities tie.
  const double p = sx * sy;
  const double denom = std::isnormal(p) ? std::sqrt(p) : std::sqrt(sx) * std::sqrt(sy);
  return std::clamp(d / denom, -1.0, 1.0);
}

/// 1 - cos(va + vb - vc, vd).
inline double analogy_distance(std::span<const double> va, std::span<const double> vb, std::span<const double> vc,
                               std::span<const double> vd) {
  std::vector<double> x(va.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = va[k] + vb[k] - vc[k];
  return 1.0 - cosine(x, vd);
}

/// 1-based ranks; tied values share the mean of their positions.
inline std::vector<double> fractional_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::invalid_argument, "correlation inputs differ in length");
  if (xs.size() < 2) throw Error(ErrorCode::insufficient_data, "correlation needs at least two pairs");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw Error(ErrorCode::undefined_correlation, "correlation of a constant series");
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::invalid_argument, "correlation inputs differ in length");
  const auto rx = fractional_ranks(xs);
  const auto ry = fractional_ranks(ys);
  return pearson(rx, ry);
}

// ---------------------------------------------------------------------------
// Datasets

struct AnalogyItem {
  std::string a, b, c, d;
  std::string category;
};

struct SimilarityItem {
  std::string w1, w2;
  double gold = 0;
};

inline std::vector<AnalogyItem> parse_analogy_dataset(std::istream& in, const std::string& name = "<analogy>") {
  std::vector<AnalogyItem> items;
  std::string line, category;
  bool have_category = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(' ') == std::string::npos) continue;
    if (line.front() == ':') {
      const auto start = line.find_first_not_of(' ', 1);
      category = start == std::string::npos ? "" : line.substr(start);
      while (!category.empty() && category.back() == ' ') category.pop_back();
      if (category.empty()) {
        throw Error(ErrorCode::dataset_parse, name + ":" + std::to_string(lineno) + ": empty category name", lineno);
      }
      have_category = true;
      continue;
    }
    const auto fields = split_spaces(line);
    if (fields.size() != 4) {
      throw Error(ErrorCode::dataset_parse,
                  name + ":" + std::to_string(lineno) + ": expected 4 words, found " + std::to_string(fields.size()),
                  lineno);
    }
    if (!have_category) {
      throw Error(ErrorCode::dataset_parse, name + ":" + std::to_string(lineno) + ": item before any ': category' line",
                  lineno);
    }
    items.push_back({std::string(fields[0]), std::string(fields[1]), std::string(fields[2]), std::string(fields[3]),
                     category});
  }
  return items;
}

inline std::vector<SimilarityItem> parse_similarity_dataset(std::istream& in, const std::string& name = "<similarity>") {
  std::vector<SimilarityItem> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    SimilarityItem item;
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || !parse_number(fields[2], item.gold)) {
      throw Error(ErrorCode::dataset_parse, name + ":" + std::to_string(lineno) + ": expected 'w1<TAB>w2<TAB>score'",
                  lineno);
    }
    item.w1 = fields[0];
    item.w2 = fields[1];
    items.push_back(std::move(item));
  }
  return items;
}

namespace detail {
inline std::ifstream open_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open dataset '" + path.string() + "'");
  return in;
}
}  // namespace detail

inline std::vector<AnalogyItem> load_analogy_dataset(const std::filesystem::path& path) {
  auto in = detail::open_dataset(path);
  return parse_analogy_dataset(in, path.string());
}

inline std::vector<SimilarityItem> load_similarity_dataset(const std::filesystem::path& path) {
  auto in = detail::open_dataset(path);
  return parse_similarity_dataset(in, path.string());
}

// ---------------------------------------------------------------------------
// Analogy

enum class AnalogyGroup { semantic, syntactic, other };

/// Groups the Korean analogy categories; the last alphanumeric run of the
/// header decides ("sem-city", "City" and "1. city" are all semantic).
inline AnalogyGroup classify_category(std::string_view name) {
  std::string word, last;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    } else if (!word.empty()) {
      last = std::move(word);
      word.clear();
    }
  }
  if (!word.empty()) last = word;
  for (const char* s : {"city", "sex", "name", "lang", "misc"}) {
    if (last == s) return AnalogyGroup::semantic;
  }
  for (const char* s : {"case", "tense", "voice", "form", "honor"}) {
    if (last == s) return AnalogyGroup::syntactic;
  }
  return AnalogyGroup::other;
}

struct AnalogyReport {
  struct Category {
    std::string name;
    AnalogyGroup group = AnalogyGroup::other;
    double mean = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t scored = 0;
    std::uint64_t skipped = 0;
  };
  std::vector<Category> categories;  // in order of first appearance
  double semantic_mean = std::numeric_limits<double>::quiet_NaN();   // mean of category means
  double syntactic_mean = std::numeric_limits<double>::quiet_NaN();  // mean of category means
  double overall_mean = std::numeric_limits<double>::quiet_NaN();    // mean over scored items
  std::uint64_t scored = 0;
  std::uint64_t skipped = 0;
  std::vector<double> distances;  // per item, NaN when skipped
};

namespace detail {
inline bool usable(const ComposedVector& v) { return !v.empty && norm(v.values) > 0; }
}  // namespace detail

template <VectorSource Source>
AnalogyReport run_analogy(const Source& source, std::span<const AnalogyItem> items) {
  AnalogyReport report;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<double> sums;
  double total = 0;
  for (const auto& item : items) {
    auto [it, fresh] = index.emplace(item.category, report.categories.size());
    if (fresh) {
      report.categories.push_back({item.category, classify_category(item.category)});
      sums.push_back(0.0);
    }
    auto& cat = report.categories[it->second];

    const auto va = source.lookup(item.a);
    const auto vb = source.lookup(item.b);
    const auto vc = source.lookup(item.c);
    const auto vd = source.lookup(item.d);
    double dist = std::numeric_limits<double>::quiet_NaN();
    if (detail::usable(va) && detail::usable(vb) && detail::usable(vc) && detail::usable(vd)) {
      try {
        dist = analogy_distance(va.values, vb.values, vc.values, vd.values);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::zero_vector) throw;
      }
    }
    report.distances.push_back(dist);
    if (std::isnan(dist)) {
      ++cat.skipped;
      ++report.skipped;
      continue;
    }
    ++cat.scored;
    ++report.scored;
    sums[it->second] += dist;
    total += dist;
  }

  double sem = 0, syn = 0;
  std::size_t n_sem = 0, n_syn = 0;
  for (std::size_t i = 0; i < report.categories.size(); ++i) {
    auto& cat = report.categories[i];
    if (cat.scored == 0) continue;
    cat.mean = sums[i] / static_cast<double>(cat.scored);
    if (cat.group == AnalogyGroup::semantic) {
      sem += cat.mean;
      ++n_sem;
    } else if (cat.group == AnalogyGroup::syntactic) {
      syn += cat.mean;
      ++n_syn;
    }
  }
  if (n_sem > 0) report.semantic_mean = sem / static_cast<double>(n_sem);
  if (n_syn > 0) report.syntactic_mean = syn / static_cast<double>(n_syn);
  if (report.scored > 0) report.overall_mean = total / static_cast<double>(report.scored);
  return report;
}

// ---------------------------------------------------------------------------
// Similarity

struct SimilarityReport {
  double pearson = 0;
  double spearman = 0;
  std::uint64_t pairs = 0;
  std::uint64_t skipped = 0;
};

template <VectorSource Source>
SimilarityReport run_similarity(const Source& source, std::span<const SimilarityItem> items) {
  SimilarityReport report;
  std::vector<double> predicted, gold;
  for (const auto& item : items) {
    const auto v1 = source.lookup(item.w1);
    const auto v2 = source.lookup(item.w2);
    if (!detail::usable(v1) || !detail::usable(v2)) {
      ++report.skipped;
      continue;
    }
    predicted.push_back(cosine(v1.values, v2.values));
    gold.push_back(item.gold);
  }
  report.pairs = predicted.size();
  if (predicted.size() < 2) {
    throw Error(ErrorCode::insufficient_data,
                "only " + std::to_string(predicted.size()) + " scorable similarity pairs (need 2)");
  }
  report.pearson = pearson(predicted, gold);
  report.spearman = spearman(predicted, gold);
  return report;
}

// ---------------------------------------------------------------------------
// Nearest neighbours

struct Neighbor {
  std::string word;
  double cosine;
};

/// Top-k vocabulary words by cosine to the query (the query itself excluded),
/// descending, ties in byte-wise word order.
template <VectorSource Source>
std::vector<Neighbor> nearest_neighbors(const Source& source, const std::string& query, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be at least 1");
  const auto q = source.lookup(query);
  if (!detail::usable(q)) throw Error(ErrorCode::zero_vector, "query '" + query + "' has no vector");
  std::string query_surface = query;
  try {
    query_surface = parse_annotated_token(query).surface;
  } catch (const Error&) {
  }

  std::vector<Neighbor> all;
  for (const auto& w : source.words()) {
    if (w == query_surface) continue;
    const auto v = source.lookup(w);
    if (!detail::usable(v)) continue;
    all.push_back({w, cosine(q.values, v.values)});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.cosine != b.cosine ? a.cosine > b.cosine : a.word < b.word;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

// ---------------------------------------------------------------------------
// Reporting

inline KeyValues analogy_key_values(const AnalogyReport& r) {
  KeyValues kv;
  for (const auto& c : r.categories) {
    kv.emplace_back("analogy.category." + c.name + ".mean", format_exact(c.mean));
    kv.emplace_back("analogy.category." + c.name + ".scored", std::to_string(c.scored));
    kv.emplace_back("analogy.category." + c.name + ".skipped", std::to_string(c.skipped));
  }
  kv.emplace_back("analogy.semantic_mean", format_exact(r.semantic_mean));
  kv.emplace_back("analogy.syntactic_mean", format_exact(r.syntactic_mean));
  kv.emplace_back("analogy.overall_mean", format_exact(r.overall_mean));
  kv.emplace_back("analogy.scored", std::to_string(r.scored));
  kv.emplace_back("analogy.skipped", std::to_string(r.skipped));
  return kv;
}

inline KeyValues similarity_key_values(const SimilarityReport& r) {
  return {
      {"similarity.pearson", format_exact(r.pearson)},
      {"similarity.spearman", format_exact(r.spearman)},
      {"similarity.pairs", std::to_string(r.pairs)},
      {"similarity.skipped", std::to_string(r.skipped)},
  };
}

inline std::string format_analogy_table(const AnalogyReport& r) {
  std::ostringstream out;
  auto cell = [](double v) { return std::isnan(v) ? std::string("-") : format_g(v, 4); };
  out << "category\tgroup\tmean_distance\tscored\tskipped\n";
  for (const auto& c : r.categories) {
    const char* group = c.group == AnalogyGroup::semantic ? "sem" : c.group == AnalogyGroup::syntactic ? "syn" : "-";
    out << c.name << '\t' << group << '\t' << cell(c.mean) << '\t' << c.scored << '\t' << c.skipped << '\n';
  }
  out << "Sem.\t" << cell(r.semantic_mean) << "\nSyn.\t" << cell(r.syntactic_mean) << "\nAll\t"
      << cell(r.overall_mean) << "\nscored\t" << r.scored << "\nskipped\t" << r.skipped << '\n';
  return out.str();
}

inline std::string format_similarity_table(const SimilarityReport& r) {
  std::ostringstream out;
  out << "Pr.\t" << format_g(r.pearson, 4) << "\nSp.\t" << format_g(r.spearman, 4) << "\npairs\t" << r.pairs
      << "\nskipped\t" << r.skipped << '\n';
  return out.str();
}

}  // namespace hsisg
