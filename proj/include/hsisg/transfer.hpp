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

// Seeding Hanja n-gram buckets with pretrained Chinese vectors before
// training. Hanja n-grams are stripped of their sequence markers, mapped
// character-wise to simplified Chinese and looked up verbatim in the lexicon.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hsisg/error.hpp"
#include "hsisg/io.hpp"
#include "hsisg/model.hpp"
#include "hsisg/ngrams.hpp"
#include "hsisg/utf8.hpp"

namespace hsisg {

struct PretrainedLexicon {
  std::uint32_t dim = 0;
  std::unordered_map<std::string, std::vector<float>> vectors;
  std::uint64_t duplicate_keys = 0;  // later rows replaced earlier ones
};

inline PretrainedLexicon make_lexicon(VecFile<float> file) {
  PretrainedLexicon lex;
  lex.dim = file.dim;
  for (auto& [key, values] : file.rows) {
    auto [it, inserted] = lex.vectors.insert_or_assign(std::move(key), std::move(values));
    if (!inserted) ++lex.duplicate_keys;
  }
  return lex;
}

inline PretrainedLexicon parse_pretrained(std::istream& in, const std::string& name = "<lexicon>") {
  return make_lexicon(parse_vec<float>(in, name));
}

inline PretrainedLexicon load_pretrained(const std::filesystem::path& path) {
  return make_lexicon(load_vec<float>(path));
}

/// Single character -> single character; anything unmapped passes through.
struct CharMapping {
  std::unordered_map<char32_t, char32_t> table;
};

/// TSV: `#` comment lines, otherwise exactly `char<TAB>char` (CJK ideographs).
inline CharMapping parse_char_mapping(std::istream& in, const std::string& name = "<mapping>") {
  CharMapping m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    std::u32string from, to;
    try {
      if (tab != std::string::npos) {
        from = utf8::decode(std::string_view(line).substr(0, tab));
        to = utf8::decode(std::string_view(line).substr(tab + 1));
      }
    } catch (const Error&) {
      from.clear();
    }
    if (tab == std::string::npos || from.size() != 1 || to.size() != 1) {
      throw Error(ErrorCode::malformed_mapping,
                  name + ":" + std::to_string(lineno) + ": expected exactly two single-character fields", lineno);
    }
    if (!is_cjk_ideograph(from[0]) || !is_cjk_ideograph(to[0])) {
      throw Error(ErrorCode::malformed_mapping, name + ":" + std::to_string(lineno) + ": not a CJK ideograph", lineno);
    }
    m.table[from[0]] = to[0];
  }
  return m;
}

inline CharMapping load_char_mapping(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  return parse_char_mapping(in, path.string());
}

inline std::string to_simplified(std::string_view s, const CharMapping& mapping) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : utf8::decode(s)) {
    auto it = mapping.table.find(cp);
    utf8::append(out, it == mapping.table.end() ? cp : it->second);
  }
  return out;
}

struct TransferReport {
  std::uint64_t slots_initialized = 0;
  std::uint64_t ngrams_matched = 0;
  std::uint64_t ngrams_missed = 0;
  std::uint64_t collisions_detected = 0;
  bool dim_check = false;
  /// Matches by n-gram length in symbols (markers included).
  std::map<std::uint32_t, std::uint64_t> matched_by_length;
};

/// Copies lexicon vectors into the bucket rows of the given Hanja n-grams.
/// N-grams are visited in byte-wise sorted order; the first write to a slot
/// wins and any later match on that slot counts as a collision.
template <class Real>
TransferReport init_hanja_slots(BasicEmbeddingModel<Real>& model, const PretrainedLexicon& lexicon,
                                const CharMapping& mapping, std::span<const std::string> hanja_ngrams) {
  TransferReport report;
  if (lexicon.dim != model.dim()) {
    throw Error(ErrorCode::dim_mismatch, "lexicon dimension " + std::to_string(lexicon.dim) +
                                             " differs from model dimension " + std::to_string(model.dim()));
  }
  report.dim_check = true;

  std::vector<std::string> ngrams(hanja_ngrams.begin(), hanja_ngrams.end());
  std::sort(ngrams.begin(), ngrams.end());
  ngrams.erase(std::unique(ngrams.begin(), ngrams.end()), ngrams.end());
  if (ngrams.empty()) return report;
  if (model.buckets() == 0) throw Error(ErrorCode::invalid_argument, "model has no n-gram buckets");

  std::unordered_set<UnitId> written;
  for (const auto& ngram : ngrams) {
    const auto key = to_simplified(strip_hanja_markers(ngram), mapping);
    auto it = lexicon.vectors.find(key);
    if (it == lexicon.vectors.end()) {
      ++report.ngrams_missed;
      continue;
    }
    ++report.ngrams_matched;
    ++report.matched_by_length[static_cast<std::uint32_t>(utf8::decode(ngram).size())];
    const UnitId slot = ngram_slot(ngram, model.vocab_size(), model.buckets());
    if (!written.insert(slot).second) {
      ++report.collisions_detected;
      continue;
    }
    auto row = model.input.row(slot);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = static_cast<Real>(it->second[k]);
  }
  report.slots_initialized = written.size();
  return report;
}

}  // namespace hsisg
