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

// Korean text handling: Hangul syllable/jamo decomposition, the annotated
// token format (`surface|seq1,seq2`) and line-oriented corpus streaming.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hsisg/error.hpp"
#include "hsisg/utf8.hpp"

namespace hsisg {

// Reserved symbols live in the Private Use Area, so they can never collide with
// Hangul, compatibility jamo, Hanja or any other text found in a corpus.
namespace marker {
inline constexpr char32_t kWordBegin = 0xE000;      // jamo stream begin-of-word
inline constexpr char32_t kWordEnd = 0xE001;        // jamo stream end-of-word
inline constexpr char32_t kEmptyJongseong = 0xE002; // syllable without final consonant
inline constexpr char32_t kHanjaBegin = 0xE003;     // <boh>
inline constexpr char32_t kHanjaEnd = 0xE004;       // <eoh>

inline bool is_reserved(char32_t cp) { return cp >= kWordBegin && cp <= kHanjaEnd; }

/// Human-readable rendering of a unit string (markers spelled out).
inline std::string display(std::string_view unit) {
  std::string out;
  std::size_t pos = 0;
  while (pos < unit.size()) {
    auto d = utf8::decode_one(unit, pos);
    if (!d) {
      out.push_back(unit[pos++]);
      continue;
    }
    switch (d->codepoint) {
      case kWordBegin: out += "<bow>"; break;
      case kWordEnd: out += "<eow>"; break;
      case kEmptyJongseong: out += "<_>"; break;
      case kHanjaBegin: out += "<boh>"; break;
      case kHanjaEnd: out += "<eoh>"; break;
      default: utf8::append(out, d->codepoint);
    }
    pos += d->length;
  }
  return out;
}
}  // namespace marker

// ---------------------------------------------------------------------------
// Jamo

enum class JamoKind : std::uint8_t {
  choseong,
  jungseong,
  jongseong,
  empty_jongseong,
  word_begin,
  word_end,
  passthrough,
};

struct Jamo {
  JamoKind kind;
  char32_t codepoint;
  std::uint8_t index = 0;  // position in its table; jongseong indices start at 1

  bool operator==(const Jamo&) const = default;
};

struct SyllableJamo {
  Jamo choseong;
  Jamo jungseong;
  Jamo jongseong;
};

namespace detail {
// Compatibility jamo (U+3131..U+3163) for each table index.
inline constexpr std::array<char32_t, 19> kChoseong = {
    0x3131, 0x3132, 0x3134, 0x3137, 0x3138, 0x3139, 0x3141, 0x3142, 0x3143, 0x3145,
    0x3146, 0x3147, 0x3148, 0x3149, 0x314A, 0x314B, 0x314C, 0x314D, 0x314E};
// Index 0 is "no final consonant" and is never looked up.
inline constexpr std::array<char32_t, 28> kJongseong = {
    0,      0x3131, 0x3132, 0x3133, 0x3134, 0x3135, 0x3136, 0x3137, 0x3139, 0x313A,
    0x313B, 0x313C, 0x313D, 0x313E, 0x313F, 0x3140, 0x3141, 0x3142, 0x3144, 0x3145,
    0x3146, 0x3147, 0x3148, 0x314A, 0x314B, 0x314C, 0x314D, 0x314E};
inline constexpr char32_t kJungseongBase = 0x314F;

inline constexpr char32_t kSyllableFirst = 0xAC00;
inline constexpr char32_t kSyllableLast = 0xD7A3;
inline constexpr char32_t kPerChoseong = 588;  // 21 * 28
inline constexpr char32_t kPerJungseong = 28;
}  // namespace detail

inline bool is_hangul_syllable(char32_t ch) {
  return ch >= detail::kSyllableFirst && ch <= detail::kSyllableLast;
}

inline SyllableJamo decompose_syllable(char32_t ch) {
  if (!is_hangul_syllable(ch)) {
    throw Error(ErrorCode::not_hangul_syllable,
                "U+" + std::to_string(static_cast<std::uint32_t>(ch)) + " is not a precomposed Hangul syllable");
  }
  const char32_t idx = ch - detail::kSyllableFirst;
  const auto cho = static_cast<std::uint8_t>(idx / detail::kPerChoseong);
  const auto jung = static_cast<std::uint8_t>((idx % detail::kPerChoseong) / detail::kPerJungseong);
  const auto jong = static_cast<std::uint8_t>(idx % detail::kPerJungseong);

  SyllableJamo out{
      {JamoKind::choseong, detail::kChoseong[cho], cho},
      {JamoKind::jungseong, detail::kJungseongBase + jung, jung},
      {JamoKind::empty_jongseong, marker::kEmptyJongseong, 0},
  };
  if (jong != 0) out.jongseong = {JamoKind::jongseong, detail::kJongseong[jong], jong};
  return out;
}

/// BOW, three jamo per Hangul syllable (one passthrough symbol per other
/// character), EOW.
namespace detail {
inline void push_jamo(std::vector<Jamo>& out, char32_t ch) {
  if (is_hangul_syllable(ch)) {
    const auto s = decompose_syllable(ch);
    out.push_back(s.choseong);
    out.push_back(s.jungseong);
    out.push_back(s.jongseong);
  } else {
    out.push_back({JamoKind::passthrough, ch, 0});
  }
}
}  // namespace detail

inline std::vector<Jamo> word_to_jamo(std::u32string_view surface) {
  if (surface.empty()) throw Error(ErrorCode::invalid_argument, "word_to_jamo: empty surface");
  std::vector<Jamo> out;
  out.reserve(surface.size() * 3 + 2);
  out.push_back({JamoKind::word_begin, marker::kWordBegin, 0});
  for (char32_t ch : surface) detail::push_jamo(out, ch);
  out.push_back({JamoKind::word_end, marker::kWordEnd, 0});
  return out;
}

inline std::vector<Jamo> word_to_jamo(std::string_view surface) {
  if (surface.empty()) throw Error(ErrorCode::invalid_argument, "word_to_jamo: empty surface");
  std::vector<Jamo> out;
  out.reserve(surface.size() + 2);
  out.push_back({JamoKind::word_begin, marker::kWordBegin, 0});
  std::size_t pos = 0;
  while (pos < surface.size()) {
    const auto d = utf8::decode_one(surface, pos);
    if (!d) throw Error(ErrorCode::utf8_decode, "invalid UTF-8 at byte " + std::to_string(pos), pos);
    detail::push_jamo(out, d->codepoint);
    pos += d->length;
  }
  out.push_back({JamoKind::word_end, marker::kWordEnd, 0});
  return out;
}

// ---------------------------------------------------------------------------
// Annotated tokens

inline bool is_cjk_ideograph(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF)      // unified
         || (cp >= 0x3400 && cp <= 0x4DBF)   // extension A
         || (cp >= 0x20000 && cp <= 0x2EE5F) // extensions B-F, I
         || (cp >= 0x30000 && cp <= 0x323AF);  // extensions G-H
}

inline constexpr char kAnnotationDelimiter = '|';
inline constexpr char kSequenceSeparator = ',';

struct AnnotatedToken {
  std::string surface;
  std::vector<std::string> hanja_seqs;

  bool operator==(const AnnotatedToken&) const = default;
};

inline std::string serialize(const AnnotatedToken& token) {
  std::string out = token.surface;
  for (std::size_t i = 0; i < token.hanja_seqs.size(); ++i) {
    out.push_back(i == 0 ? kAnnotationDelimiter : kSequenceSeparator);
    out += token.hanja_seqs[i];
  }
  return out;
}

namespace detail {
[[noreturn]] inline void malformed(std::string_view raw, std::size_t pos, const std::string& why) {
  throw Error(ErrorCode::malformed_annotation,
              why + " at byte " + std::to_string(pos) + " in '" + std::string(raw) + "'", pos);
}

inline bool is_ascii_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' || cp == '\f';
}
}  // namespace detail

/// Parses `surface` or `surface|seq1,...,seqk`. Error positions are byte
/// offsets into `raw`.
inline AnnotatedToken parse_annotated_token(std::string_view raw) {
  const std::size_t bar = raw.find(kAnnotationDelimiter);
  const std::string_view surface = raw.substr(0, bar);
  if (surface.empty()) detail::malformed(raw, 0, "empty surface");

  std::size_t pos = 0;
  while (pos < surface.size()) {
    auto d = utf8::decode_one(surface, pos);
    if (!d) detail::malformed(raw, pos, "invalid UTF-8");
    if (detail::is_ascii_space(d->codepoint)) detail::malformed(raw, pos, "whitespace in surface");
    if (d->codepoint == static_cast<char32_t>(kSequenceSeparator)) detail::malformed(raw, pos, "',' in surface");
    pos += d->length;
  }

  AnnotatedToken token{std::string(surface), {}};
  if (bar == std::string_view::npos) return token;

  std::size_t seg_start = bar + 1;
  while (true) {
    std::size_t seg_end = raw.find(kSequenceSeparator, seg_start);
    if (seg_end == std::string_view::npos) seg_end = raw.size();
    if (seg_end == seg_start) detail::malformed(raw, seg_start, "empty annotation segment");
    const std::string_view seg = raw.substr(seg_start, seg_end - seg_start);
    pos = 0;
    while (pos < seg.size()) {
      auto d = utf8::decode_one(seg, pos);
      if (!d) detail::malformed(raw, seg_start + pos, "invalid UTF-8");
      if (!is_cjk_ideograph(d->codepoint)) detail::malformed(raw, seg_start + pos, "non-CJK character in annotation");
      pos += d->length;
    }
    token.hanja_seqs.emplace_back(seg);
    if (seg_end == raw.size()) break;
    seg_start = seg_end + 1;
  }
  return token;
}

// ---------------------------------------------------------------------------
// Corpus streaming

struct SentenceToken {
  std::size_t sentence;
  AnnotatedToken token;
};

struct MalformedReport {
  std::uint64_t position;  // absolute byte offset in the source
  std::string message;
};

struct StreamStats {
  std::uint64_t tokens = 0;
  std::uint64_t lines = 0;
  std::uint64_t malformed = 0;
  std::vector<MalformedReport> reports;  // first kMaxReports only

  static constexpr std::size_t kMaxReports = 100;
};

/// Next maximal run of non-whitespace bytes at or after `cursor`.
inline bool next_field(std::string_view line, std::size_t& cursor, std::string_view& field) {
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
  while (cursor < line.size() && space(line[cursor])) ++cursor;
  if (cursor == line.size()) return false;
  const std::size_t start = cursor;
  while (cursor < line.size() && !space(line[cursor])) ++cursor;
  field = line.substr(start, cursor - start);
  return true;
}

/// Single-owner reader over the lines whose first byte lies in [begin, end).
class CorpusStream {
 public:
  CorpusStream(std::unique_ptr<std::istream> in, std::uint64_t begin, std::uint64_t end)
      : in_(std::move(in)), end_(end) {
    if (begin > 0) {
      in_->seekg(static_cast<std::streamoff>(begin - 1));
      char c = 0;
      if (in_->get(c) && c != '\n') {
        std::string skipped;
        std::getline(*in_, skipped);
      }
    }
    if (!*in_) {
      done_ = true;
      return;
    }
    offset_ = static_cast<std::uint64_t>(in_->tellg());
  }

  /// Reads the next raw line; false at the end of the range.
  bool next_line(std::string& line) {
    if (done_ || offset_ >= end_) return false;
    if (!std::getline(*in_, line)) {
      if (in_->bad()) throw Error(ErrorCode::io, "read failure in corpus stream");
      done_ = true;
      return false;
    }
    line_offset_ = offset_;
    offset_ += line.size() + (in_->eof() ? 0 : 1);
    ++stats_.lines;
    if (auto bad = utf8::find_invalid(line)) {
      throw Error(ErrorCode::utf8_decode,
                  "invalid UTF-8 at byte " + std::to_string(line_offset_ + *bad), line_offset_ + *bad);
    }
    return true;
  }

  /// Next well-formed token in document order; malformed tokens are counted
  /// and skipped.
  std::optional<SentenceToken> next() {
    while (true) {
      std::string_view field;
      while (next_field(line_, cursor_, field)) {
        const std::size_t start = static_cast<std::size_t>(field.data() - line_.data());
        try {
          auto token = parse_annotated_token(field);
          ++stats_.tokens;
          return SentenceToken{stats_.lines - 1, std::move(token)};
        } catch (const Error& e) {
          ++stats_.malformed;
          if (stats_.reports.size() < StreamStats::kMaxReports) {
            stats_.reports.push_back({line_offset_ + start + e.detail(), e.what()});
          }
        }
      }
      if (!next_line(line_)) return std::nullopt;
      cursor_ = 0;
    }
  }

  const StreamStats& stats() const { return stats_; }

 private:
  std::unique_ptr<std::istream> in_;
  std::uint64_t end_;
  std::uint64_t offset_ = 0;
  std::uint64_t line_offset_ = 0;
  bool done_ = false;
  std::string line_;
  std::size_t cursor_ = 0;
  StreamStats stats_;
};

/// A corpus backed either by a file or by an in-memory string. Each call to
/// open() hands out an independent stream.
class Corpus {
 public:
  static Corpus from_file(std::filesystem::path path) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) throw Error(ErrorCode::io, "cannot read corpus '" + path.string() + "': " + ec.message());
    Corpus c;
    c.path_ = std::move(path);
    c.size_ = size;
    return c;
  }

  static Corpus from_text(std::string text) {
    Corpus c;
    c.size_ = text.size();
    c.text_ = std::make_shared<const std::string>(std::move(text));
    return c;
  }

  std::uint64_t size_bytes() const { return size_; }

  CorpusStream open(std::uint64_t begin = 0,
                    std::uint64_t end = std::numeric_limits<std::uint64_t>::max()) const {
    if (text_) return CorpusStream(std::make_unique<std::istringstream>(*text_), begin, end);
    auto in = std::make_unique<std::ifstream>(path_, std::ios::binary);
    if (!*in) throw Error(ErrorCode::io, "cannot open corpus '" + path_.string() + "'");
    return CorpusStream(std::move(in), begin, end);
  }

 private:
  Corpus() = default;
  std::filesystem::path path_;
  std::shared_ptr<const std::string> text_;
  std::uint64_t size_ = 0;
};

}  // namespace hsisg
