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

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hsisg/error.hpp"
#include "hsisg/ngrams.hpp"
#include "hsisg/text_units.hpp"

namespace hsisg {

struct VocabEntry {
  std::string surface;
  /// Most frequent annotation observed for the word (possibly none). Used
  /// whenever the word is looked up without an explicit annotation.
  std::vector<std::string> hanja_seqs;
  std::uint64_t count = 0;
  UnitSet units;

  AnnotatedToken token() const { return {surface, hanja_seqs}; }
};

/// Words sorted by descending count, ties broken by byte-wise order of the
/// surface; ids are positions in `entries`.
class Vocab {
 public:
  std::vector<VocabEntry> entries;
  std::uint64_t total_tokens = 0;     // well-formed tokens in the corpus
  std::uint64_t malformed_tokens = 0;
  std::uint64_t lines = 0;
  /// Distinct raw token forms (surface plus annotation) of in-vocabulary words.
  std::vector<std::string> forms;
  /// Distinct Hanja n-grams of in-vocabulary tokens, byte-wise sorted.
  std::vector<std::string> hanja_ngrams;

  std::size_t size() const { return entries.size(); }

  std::optional<UnitId> find(const std::string& surface) const {
    auto it = index_.find(surface);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  void rebuild_index() {
    index_.clear();
    index_.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) index_.emplace(entries[i].surface, static_cast<UnitId>(i));
  }

  /// Recomputes every entry's unit set for `config`.
  void assign_units(const NGramConfig& config) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      entries[i].units = units_for_word(entries[i].token(), static_cast<UnitId>(i), entries.size(), config);
    }
  }

 private:
  std::unordered_map<std::string, UnitId> index_;
};

inline UnitSet units_for_word(const AnnotatedToken& token, const Vocab& vocab, const NGramConfig& config) {
  return units_for_word(token, vocab.find(token.surface), vocab.size(), config);
}

namespace detail {
inline std::vector<std::string> split_annotation(const std::string& key) {
  std::vector<std::string> seqs;
  if (key.empty()) return seqs;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = key.find(kSequenceSeparator, start);
    seqs.push_back(key.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return seqs;
}

inline std::string join_annotation(const std::vector<std::string>& seqs) {
  std::string key;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (i > 0) key.push_back(kSequenceSeparator);
    key += seqs[i];
  }
  return key;
}
}  // namespace detail

inline Vocab build_vocab(const Corpus& corpus, std::uint64_t min_count, const NGramConfig& config) {
  config.validate();
  struct Counter {
    std::uint64_t count = 0;
    std::map<std::string, std::uint64_t> annotations;  // joined sequences -> count
  };
  std::unordered_map<std::string, Counter> counts;

  auto stream = corpus.open();
  while (auto st = stream.next()) {
    auto& c = counts[st->token.surface];
    ++c.count;
    ++c.annotations[detail::join_annotation(st->token.hanja_seqs)];
  }

  Vocab vocab;
  vocab.total_tokens = stream.stats().tokens;
  vocab.malformed_tokens = stream.stats().malformed;
  vocab.lines = stream.stats().lines;
  if (vocab.total_tokens == 0) throw Error(ErrorCode::empty_corpus, "corpus contains no tokens");

  std::set<std::string> annotation_keys;
  std::vector<std::string> forms;
  for (auto& [surface, c] : counts) {
    if (c.count < min_count) continue;
    const std::string* best = nullptr;
    std::uint64_t best_count = 0;
    for (const auto& [key, n] : c.annotations) {  // ordered, so ties keep the smallest key
      if (n > best_count) {
        best = &key;
        best_count = n;
      }
      if (!key.empty()) {
        annotation_keys.insert(key);
        forms.push_back(surface + kAnnotationDelimiter + key);
      } else {
        forms.push_back(surface);
      }
    }
    vocab.entries.push_back({surface, detail::split_annotation(*best), c.count, {}});
  }
  if (vocab.entries.empty()) {
    throw Error(ErrorCode::empty_corpus, "no word occurs at least min_count=" + std::to_string(min_count) + " times");
  }
  std::sort(vocab.entries.begin(), vocab.entries.end(), [](const VocabEntry& a, const VocabEntry& b) {
    return a.count != b.count ? a.count > b.count : a.surface < b.surface;
  });
  if (vocab.entries.size() + config.effective_buckets() > std::numeric_limits<UnitId>::max()) {
    throw Error(ErrorCode::invalid_argument, "vocabulary plus bucket size exceeds the 32-bit unit space");
  }
  std::sort(forms.begin(), forms.end());
  vocab.forms = std::move(forms);

  if (config.granularities.hanja) {
    std::set<std::string> ngrams;
    for (const auto& key : annotation_keys) {
      for (auto& g : hanja_ngrams(detail::split_annotation(key), config.hanja_min, config.hanja_max)) {
        ngrams.insert(std::move(g));
      }
    }
    vocab.hanja_ngrams.assign(ngrams.begin(), ngrams.end());
  }

  vocab.rebuild_index();
  vocab.assign_units(config);
  return vocab;
}

}  // namespace hsisg
