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

// Character, jamo and Hanja n-gram extraction and the mapping of every unit
// (whole word or hashed n-gram) onto a row of the input embedding matrix.
//
// Row layout of the input matrix:
//   [0, V)        whole-word vectors, by vocabulary id
//   [V, V + B)    hashed n-gram buckets, V + fnv1a32(unit) % B

#pragma once

#include <algorithm>
#include <cstring>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "hsisg/error.hpp"
#include "hsisg/text_units.hpp"
#include "hsisg/utf8.hpp"

namespace hsisg {

using UnitId = std::uint32_t;

enum class UnitKind : std::uint8_t { word, character, jamo, hanja };

/// Subset of {c, j, h}; spelled the way model variants are named (SISG(cj)).
struct Granularities {
  bool character = false;
  bool jamo = false;
  bool hanja = false;

  bool any() const { return character || jamo || hanja; }
  bool operator==(const Granularities&) const = default;

  std::uint8_t mask() const {
    return static_cast<std::uint8_t>((character ? 1 : 0) | (jamo ? 2 : 0) | (hanja ? 4 : 0));
  }
  static Granularities from_mask(std::uint8_t m) {
    if (m > 7) throw Error(ErrorCode::invalid_argument, "granularity mask out of range");
    return {(m & 1) != 0, (m & 2) != 0, (m & 4) != 0};
  }

  /// "none", or any non-empty combination of the letters c, j, h.
  static Granularities parse(std::string_view s) {
    if (s == "none") return {};
    if (s.empty()) throw Error(ErrorCode::invalid_argument, "empty granularity string");
    Granularities g;
    for (char ch : s) {
      bool* slot = ch == 'c' ? &g.character : ch == 'j' ? &g.jamo : ch == 'h' ? &g.hanja : nullptr;
      if (slot == nullptr || *slot) {
        throw Error(ErrorCode::invalid_argument, "bad granularity string '" + std::string(s) + "'");
      }
      *slot = true;
    }
    return g;
  }

  std::string to_string() const {
    if (!any()) return "none";
    std::string s;
    if (character) s += 'c';
    if (jamo) s += 'j';
    if (hanja) s += 'h';
    return s;
  }
};

struct NGramConfig {
  std::uint32_t char_min = 1;
  std::uint32_t char_max = 6;
  std::uint32_t jamo_min = 3;
  std::uint32_t jamo_max = 5;
  std::uint32_t hanja_min = 1;
  std::uint32_t hanja_max = 3;
  std::uint64_t bucket_size = 20'000'000;
  Granularities granularities{true, true, true};

  bool operator==(const NGramConfig&) const = default;

  /// Rows reserved for n-grams; none when every granularity is off.
  std::uint64_t effective_buckets() const { return granularities.any() ? bucket_size : 0; }

  void validate() const {
    auto check = [](bool enabled, std::uint32_t lo, std::uint32_t hi, const char* what) {
      if (enabled && (lo < 1 || lo > hi)) {
        throw Error(ErrorCode::invalid_argument, std::string("invalid ") + what + " n-gram range");
      }
    };
    check(granularities.character, char_min, char_max, "character");
    check(granularities.jamo, jamo_min, jamo_max, "jamo");
    check(granularities.hanja, hanja_min, hanja_max, "hanja");
    if (bucket_size < 1) throw Error(ErrorCode::invalid_argument, "bucket size must be at least 1");
  }

  static NGramConfig sg() { return with({}); }
  static NGramConfig sisg_c() { return with({true, false, false}); }
  static NGramConfig sisg_cj() { return with({true, true, false}); }
  static NGramConfig sisg_cjh3() { return with({true, true, true}); }
  static NGramConfig sisg_cjh4() {
    auto c = with({true, true, true});
    c.hanja_max = 4;
    return c;
  }

 private:
  static NGramConfig with(Granularities g) {
    NGramConfig c;
    c.granularities = g;
    return c;
  }
};

// ---------------------------------------------------------------------------
// Extraction. All lengths are counted in symbols (codepoints); markers are
// single symbols. Results are ordered by length, then by position.
//
// The visit_* functions hand each window to a callback as a view into a
// scratch buffer, without allocating per n-gram; the list-returning
// functions are built on them.

namespace detail {

/// UTF-8 text plus the byte offset of every symbol boundary. Storage only
/// grows, so a reused buffer stops allocating after the longest word.
class SymbolBuffer {
 public:
  void clear() {
    size_ = 0;
    count_ = 0;
  }
  void push(char32_t cp) {
    reserve(4);
    bounds_[count_++] = size_;
    size_ += static_cast<std::uint32_t>(utf8::encode_to(bytes_.data() + size_, cp));
  }
  /// Appends UTF-8 text symbol by symbol.
  void push_utf8(std::string_view text) {
    reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto d = utf8::decode_one(text, pos);
      if (!d) throw Error(ErrorCode::utf8_decode, "invalid UTF-8 at byte " + std::to_string(pos), pos);
      bounds_[count_++] = size_;
      std::memcpy(bytes_.data() + size_, text.data() + pos, d->length);
      size_ += static_cast<std::uint32_t>(d->length);
      pos += d->length;
    }
  }
  /// Records the end boundary; call once after the last push.
  void seal() {
    reserve(0);
    bounds_[count_] = size_;
  }
  std::size_t symbols() const { return count_; }
  std::string_view bytes() const { return {bytes_.data(), size_}; }
  const char* data() const { return bytes_.data(); }
  const std::uint32_t* bounds() const { return bounds_.data(); }

  std::string_view window(std::size_t i, std::size_t n) const {
    return {bytes_.data() + bounds_[i], bounds_[i + n] - bounds_[i]};
  }

 private:
  // Room for `extra` more bytes and symbols, plus the closing boundary.
  void reserve(std::size_t extra) {
    if (size_ + extra > bytes_.size()) bytes_.resize(2 * (size_ + extra) + 64);
    if (count_ + extra + 1 >= bounds_.size()) bounds_.resize(2 * (count_ + extra) + 16);
  }

  std::vector<char> bytes_;
  std::vector<std::uint32_t> bounds_;
  std::uint32_t size_ = 0;
  std::uint32_t count_ = 0;
};

/// Windows of a sealed buffer with length in [min, max]; when `skip_edges`,
/// the first and last symbols are never emitted alone (they are markers).
template <class Emit>
void visit_windows(const SymbolBuffer& buf, std::uint32_t min, std::uint32_t max, bool skip_edges, Emit&& emit) {
  const std::size_t length = buf.symbols();
  const char* data = buf.data();
  const std::uint32_t* bounds = buf.bounds();
  for (std::size_t n = min; n <= max && n <= length; ++n) {
    const bool edges = skip_edges && n == 1;
    const std::size_t first = edges ? 1 : 0;
    const std::size_t last = edges ? length - 1 : length - n + 1;  // exclusive
    for (std::size_t i = first; i < last; ++i) {
      emit(std::string_view(data + bounds[i], bounds[i + n] - bounds[i]));
    }
  }
}

inline SymbolBuffer& scratch_buffer() {
  thread_local SymbolBuffer buf;
  return buf;
}

}  // namespace detail

/// Substrings of `<surface>`; the lone `<` and `>` are never emitted.
template <class Emit>
void visit_char_ngrams(std::string_view surface, std::uint32_t min, std::uint32_t max, Emit&& emit) {
  auto& buf = detail::scratch_buffer();
  buf.clear();
  buf.push(U'<');
  buf.push_utf8(surface);
  buf.push(U'>');
  buf.seal();
  detail::visit_windows(buf, min, max, true, emit);
}

inline std::vector<std::string> char_ngrams(std::string_view surface, std::uint32_t min, std::uint32_t max) {
  std::vector<std::string> out;
  visit_char_ngrams(surface, min, max, [&](std::string_view g) { out.emplace_back(g); });
  return out;
}

inline std::string jamo_string(std::span<const Jamo> jamo) {
  std::string out;
  for (const auto& j : jamo) utf8::append(out, j.codepoint);
  return out;
}

/// Every window of the jamo stream (including BOW/EOW) with length in [min, max].
template <class Emit>
void visit_jamo_ngrams(std::span<const Jamo> seq, std::uint32_t min, std::uint32_t max, Emit&& emit) {
  auto& buf = detail::scratch_buffer();
  buf.clear();
  for (const auto& j : seq) buf.push(j.codepoint);
  buf.seal();
  detail::visit_windows(buf, min, max, false, emit);
}

/// Same as visit_jamo_ngrams over word_to_jamo(surface), without building
/// the intermediate jamo list.
template <class Emit>
void visit_word_jamo_ngrams(std::string_view surface, std::uint32_t min, std::uint32_t max, Emit&& emit) {
  if (surface.empty()) throw Error(ErrorCode::invalid_argument, "jamo n-grams of an empty surface");
  auto& buf = detail::scratch_buffer();
  buf.clear();
  buf.push(marker::kWordBegin);
  std::size_t pos = 0;
  while (pos < surface.size()) {
    const auto d = utf8::decode_one(surface, pos);
    if (!d) throw Error(ErrorCode::utf8_decode, "invalid UTF-8 at byte " + std::to_string(pos), pos);
    if (is_hangul_syllable(d->codepoint)) {
      const auto s = decompose_syllable(d->codepoint);
      buf.push(s.choseong.codepoint);
      buf.push(s.jungseong.codepoint);
      buf.push(s.jongseong.codepoint);
    } else {
      buf.push(d->codepoint);
    }
    pos += d->length;
  }
  buf.push(marker::kWordEnd);
  buf.seal();
  detail::visit_windows(buf, min, max, false, emit);
}

inline std::vector<std::string> jamo_ngrams(std::span<const Jamo> seq, std::uint32_t min, std::uint32_t max) {
  std::vector<std::string> out;
  visit_jamo_ngrams(seq, min, max, [&](std::string_view g) { out.emplace_back(g); });
  return out;
}

/// N-grams of `<boh> seq <eoh>` for each sequence in turn, marker-only
/// singletons excluded. Repeats are emitted as often as they occur.
template <class Emit>
void visit_hanja_ngrams(std::span<const std::string> seqs, std::uint32_t min, std::uint32_t max, Emit&& emit) {
  auto& buf = detail::scratch_buffer();
  for (const auto& seq : seqs) {
    buf.clear();
    buf.push(marker::kHanjaBegin);
    buf.push_utf8(seq);
    buf.push(marker::kHanjaEnd);
    buf.seal();
    detail::visit_windows(buf, min, max, true, emit);
  }
}

/// Union over sequences of their Hanja n-grams, deduplicated in
/// first-occurrence order.
inline std::vector<std::string> hanja_ngrams(std::span<const std::string> seqs, std::uint32_t min,
                                             std::uint32_t max) {
  std::vector<std::string> out;
  visit_hanja_ngrams(seqs, min, max, [&](std::string_view g) {
    if (std::find(out.begin(), out.end(), g) == out.end()) out.emplace_back(g);
  });
  return out;
}

/// Removes the <boh>/<eoh> markers from a Hanja n-gram.
inline std::string strip_hanja_markers(std::string_view ngram) {
  std::string out;
  std::size_t pos = 0;
  while (pos < ngram.size()) {
    auto d = utf8::decode_one(ngram, pos);
    if (!d) throw Error(ErrorCode::utf8_decode, "invalid UTF-8 in n-gram", pos);
    if (d->codepoint != marker::kHanjaBegin && d->codepoint != marker::kHanjaEnd) {
      utf8::append(out, d->codepoint);
    }
    pos += d->length;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hashing

/// 32-bit FNV-1a over the UTF-8 bytes.
constexpr std::uint32_t fnv1a32(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 16777619u;
  }
  return h;
}

inline UnitId ngram_slot(std::string_view unit, std::uint64_t vocab_size, std::uint64_t buckets) {
  return static_cast<UnitId>(vocab_size + fnv1a32(unit) % buckets);
}

// ---------------------------------------------------------------------------
// Unit sets

/// The units whose input vectors make up a word: the whole-word unit first
/// (when the word is in the vocabulary), then n-gram slots. Slots are unique.
struct UnitSet {
  std::vector<UnitId> ids;
  std::vector<UnitKind> kinds;

  bool empty() const { return ids.empty(); }
  std::size_t size() const { return ids.size(); }
  std::optional<UnitId> word_id() const {
    if (!kinds.empty() && kinds.front() == UnitKind::word) return ids.front();
    return std::nullopt;
  }
  bool contains(UnitId id) const {
    for (UnitId u : ids) {
      if (u == id) return true;
    }
    return false;
  }
  bool operator==(const UnitSet&) const = default;
};

namespace detail {
class UnitSetBuilder {
 public:
  void add(UnitId id, UnitKind kind) {
    if (seen_.insert(id).second) {
      set_.ids.push_back(id);
      set_.kinds.push_back(kind);
    }
  }
  UnitSet take() { return std::move(set_); }

 private:
  UnitSet set_;
  std::unordered_set<UnitId> seen_;
};
}  // namespace detail

/// Unit set of `token` given its vocabulary id (if any) and the vocabulary size.
inline UnitSet units_for_word(const AnnotatedToken& token, std::optional<UnitId> word_id,
                              std::uint64_t vocab_size, const NGramConfig& config) {
  detail::UnitSetBuilder b;
  if (word_id) b.add(*word_id, UnitKind::word);
  const auto& g = config.granularities;
  if (!g.any()) return b.take();

  const std::uint64_t buckets = config.bucket_size;
  auto adder = [&](UnitKind kind) {
    return [&b, kind, vocab_size, buckets](std::string_view s) { b.add(ngram_slot(s, vocab_size, buckets), kind); };
  };
  if (g.character) visit_char_ngrams(token.surface, config.char_min, config.char_max, adder(UnitKind::character));
  if (g.jamo) {
    visit_word_jamo_ngrams(token.surface, config.jamo_min, config.jamo_max, adder(UnitKind::jamo));
  }
  if (g.hanja) visit_hanja_ngrams(token.hanja_seqs, config.hanja_min, config.hanja_max, adder(UnitKind::hanja));
  return b.take();
}

}  // namespace hsisg
