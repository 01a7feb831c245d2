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

// Binary model files (little-endian throughout):
//
//   "HSISG\x01"                               6 bytes
//   u32 version, u32 dim, u64 V, u64 bucket_size
//   u32 char_min, char_max, jamo_min, jamo_max, hanja_min, hanja_max
//   u8  granularity mask (c = 1, j = 2, h = 4)
//   f64 lr, f64 sampling threshold, u32 epochs, u32 negatives, u32 window,
//   u64 seed
//   V x { u32 byte length, UTF-8 word, u64 count }
//   f32 input matrix  ((V + buckets) x dim, row-major)
//   f32 output matrix (V x dim, row-major)
//   u32 CRC-32 of every preceding byte
//
// `buckets` is bucket_size, or 0 when no granularity is enabled. A word that
// carries a usual Hanja annotation is stored in its `surface|seq,...` form.
// Reserved symbols inside n-grams: U+E000/U+E001 jamo word boundaries, U+E002
// empty final consonant, U+E003/U+E004 Hanja sequence boundaries.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <zlib.h>

#include "hsisg/error.hpp"
#include "hsisg/io.hpp"
#include "hsisg/model.hpp"
#include "hsisg/text_units.hpp"

namespace hsisg {

inline constexpr char kModelMagic[6] = {'H', 'S', 'I', 'S', 'G', '\x01'};
inline constexpr std::uint32_t kModelVersion = 1;

struct ModelHeader {
  std::uint32_t version = kModelVersion;
  std::uint32_t dim = 0;
  std::uint64_t vocab_size = 0;
  std::uint64_t bucket_size = 0;
  NGramConfig ngram;
  double lr = 0;
  double subsample_t = 0;
  std::uint32_t epochs = 0;
  std::uint32_t negatives = 0;
  std::uint32_t window = 0;
  std::uint64_t seed = 0;

  std::uint64_t input_rows() const { return vocab_size + ngram.effective_buckets(); }

  TrainConfig train_config() const {
    TrainConfig c;
    c.dim = dim;
    c.epochs = epochs;
    c.lr = lr;
    c.negatives = negatives;
    c.window = window;
    c.subsample_t = subsample_t;
    c.ngram = ngram;
    c.seed = seed;
    return c;
  }
};

namespace detail {

class LeWriter {
 public:
  explicit LeWriter(std::ostream& out) : out_(out), crc_(crc32(0L, Z_NULL, 0)) {}

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    const auto* p = static_cast<const Bytef*>(data);
    while (n > 0) {  // zlib takes 32-bit lengths
      const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
      crc_ = crc32(crc_, p, chunk);
      p += chunk;
      n -= chunk;
    }
  }
  template <class T>
  void scalar(T value) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    bytes(buf, sizeof(T));
  }
  void floats(std::span<const float> values) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(values.data(), values.size_bytes());
    } else {
      for (float v : values) scalar(v);
    }
  }
  std::uint32_t crc() const { return static_cast<std::uint32_t>(crc_); }

 private:
  std::ostream& out_;
  uLong crc_;
};

class LeReader {
 public:
  explicit LeReader(std::istream& in) : in_(in), crc_(crc32(0L, Z_NULL, 0)) {}

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw Error(ErrorCode::truncated_file, "model file ends at byte " + std::to_string(offset_ + in_.gcount()),
                  offset_ + static_cast<std::size_t>(in_.gcount()));
    }
    offset_ += n;
    const auto* p = static_cast<const Bytef*>(data);
    while (n > 0) {
      const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
      crc_ = crc32(crc_, p, chunk);
      p += chunk;
      n -= chunk;
    }
  }
  template <class T>
  T scalar() {
    unsigned char buf[sizeof(T)];
    bytes(buf, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
  }
  void floats(std::span<float> values) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(values.data(), values.size_bytes());
    } else {
      for (float& v : values) v = scalar<float>();
    }
  }
  std::uint32_t crc() const { return static_cast<std::uint32_t>(crc_); }
  std::uint64_t offset() const { return offset_; }

 private:
  std::istream& in_;
  uLong crc_;
  std::uint64_t offset_ = 0;
};

inline ModelHeader read_header(LeReader& r) {
  char magic[sizeof kModelMagic];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kModelMagic, sizeof magic) != 0) {
    throw Error(ErrorCode::bad_magic, "not an hsisg model file (bad magic bytes)");
  }
  ModelHeader h;
  h.version = r.scalar<std::uint32_t>();
  if (h.version != kModelVersion) {
    throw Error(ErrorCode::bad_version, "unsupported model version " + std::to_string(h.version));
  }
  h.dim = r.scalar<std::uint32_t>();
  h.vocab_size = r.scalar<std::uint64_t>();
  h.bucket_size = r.scalar<std::uint64_t>();
  h.ngram.bucket_size = h.bucket_size;
  h.ngram.char_min = r.scalar<std::uint32_t>();
  h.ngram.char_max = r.scalar<std::uint32_t>();
  h.ngram.jamo_min = r.scalar<std::uint32_t>();
  h.ngram.jamo_max = r.scalar<std::uint32_t>();
  h.ngram.hanja_min = r.scalar<std::uint32_t>();
  h.ngram.hanja_max = r.scalar<std::uint32_t>();
  h.ngram.granularities = Granularities::from_mask(r.scalar<std::uint8_t>());
  h.lr = r.scalar<double>();
  h.subsample_t = r.scalar<double>();
  h.epochs = r.scalar<std::uint32_t>();
  h.negatives = r.scalar<std::uint32_t>();
  h.window = r.scalar<std::uint32_t>();
  h.seed = r.scalar<std::uint64_t>();
  if (h.dim == 0) throw Error(ErrorCode::malformed_header, "model dimension is zero");
  return h;
}

struct StoredWord {
  std::string text;  // surface, or surface|annotation
  std::uint64_t count;
};

inline std::vector<StoredWord> read_vocab_block(LeReader& r, std::uint64_t n, std::uint64_t file_size) {
  std::vector<StoredWord> words;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto len = r.scalar<std::uint32_t>();
    if (r.offset() + len > file_size) throw Error(ErrorCode::truncated_file, "vocabulary block is truncated");
    std::string text(len, '\0');
    r.bytes(text.data(), len);
    const auto count = r.scalar<std::uint64_t>();
    words.push_back({std::move(text), count});
  }
  return words;
}

inline std::uint64_t file_size_of(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::io, "cannot read '" + path.string() + "': " + ec.message());
  return size;
}

}  // namespace detail

inline void write_model(std::ostream& out, const EmbeddingModel& model) {
  detail::LeWriter w(out);
  const auto& c = model.config;
  w.bytes(kModelMagic, sizeof kModelMagic);
  w.scalar<std::uint32_t>(kModelVersion);
  w.scalar<std::uint32_t>(c.dim);
  w.scalar<std::uint64_t>(model.vocab.size());
  w.scalar<std::uint64_t>(c.ngram.bucket_size);
  w.scalar<std::uint32_t>(c.ngram.char_min);
  w.scalar<std::uint32_t>(c.ngram.char_max);
  w.scalar<std::uint32_t>(c.ngram.jamo_min);
  w.scalar<std::uint32_t>(c.ngram.jamo_max);
  w.scalar<std::uint32_t>(c.ngram.hanja_min);
  w.scalar<std::uint32_t>(c.ngram.hanja_max);
  w.scalar<std::uint8_t>(c.ngram.granularities.mask());
  w.scalar<double>(c.lr);
  w.scalar<double>(c.subsample_t);
  w.scalar<std::uint32_t>(c.epochs);
  w.scalar<std::uint32_t>(c.negatives);
  w.scalar<std::uint32_t>(c.window);
  w.scalar<std::uint64_t>(c.seed);
  for (const auto& e : model.vocab.entries) {
    const std::string text = serialize(e.token());
    w.scalar<std::uint32_t>(static_cast<std::uint32_t>(text.size()));
    w.bytes(text.data(), text.size());
    w.scalar<std::uint64_t>(e.count);
  }
  w.floats(model.input.data());
  w.floats(model.output.data());
  const std::uint32_t crc = w.crc();
  w.scalar<std::uint32_t>(crc);
}

inline void save_model(const EmbeddingModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) { write_model(out, model); });
}

inline EmbeddingModel load_model(const std::filesystem::path& path) {
  const auto file_size = detail::file_size_of(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  detail::LeReader r(in);
  const ModelHeader h = detail::read_header(r);
  auto words = detail::read_vocab_block(r, h.vocab_size, file_size);

  const std::uint64_t matrix_bytes = (h.input_rows() + h.vocab_size) * h.dim * sizeof(float);
  if (r.offset() + matrix_bytes + sizeof(std::uint32_t) > file_size) {
    throw Error(ErrorCode::truncated_file, "model file is shorter than its header announces");
  }

  EmbeddingModel model;
  model.config = h.train_config();
  for (auto& w : words) {
    auto token = parse_annotated_token(w.text);
    model.vocab.entries.push_back({std::move(token.surface), std::move(token.hanja_seqs), w.count, {}});
    model.vocab.total_tokens += w.count;
  }
  model.vocab.rebuild_index();
  model.vocab.assign_units(model.config.ngram);

  model.input = Matrix<float>(h.input_rows(), h.dim);
  model.output = Matrix<float>(h.vocab_size, h.dim);
  r.floats(model.input.data());
  r.floats(model.output.data());
  const std::uint32_t computed = r.crc();
  const auto stored = r.scalar<std::uint32_t>();
  if (stored != computed) throw Error(ErrorCode::checksum_mismatch, "CRC-32 mismatch in '" + path.string() + "'");
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::checksum_mismatch, "trailing bytes after checksum in '" + path.string() + "'");
  }
  return model;
}

struct ModelSummary {
  ModelHeader header;
  std::vector<std::pair<std::string, std::uint64_t>> words;
  std::uint64_t file_size = 0;
  std::uint64_t expected_size = 0;
};

/// Header and vocabulary only; matrices are not read.
inline ModelSummary inspect_model(const std::filesystem::path& path) {
  ModelSummary s;
  s.file_size = detail::file_size_of(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  detail::LeReader r(in);
  s.header = detail::read_header(r);
  for (auto& w : detail::read_vocab_block(r, s.header.vocab_size, s.file_size)) {
    s.words.emplace_back(std::move(w.text), w.count);
  }
  s.expected_size =
      r.offset() + (s.header.input_rows() + s.header.vocab_size) * s.header.dim * sizeof(float) + sizeof(std::uint32_t);
  return s;
}

/// word2vec text export; `composed` writes unit-sum word vectors, otherwise
/// the raw whole-word input rows.
template <class Real>
void write_vec(std::ostream& out, const BasicEmbeddingModel<Real>& model, bool composed) {
  out << model.vocab.size() << ' ' << model.dim() << '\n';
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    const auto& e = model.vocab.entries[i];
    out << e.surface;
    if (composed) {
      for (double x : word_vector(model, e.token()).values) out << ' ' << format_g(x, 6);
    } else {
      for (Real x : model.input.row(i)) out << ' ' << format_g(static_cast<double>(x), 6);
    }
    out << '\n';
  }
}

template <class Real>
void export_vec(const BasicEmbeddingModel<Real>& model, const std::filesystem::path& path, bool composed) {
  write_file_atomic(path, [&](std::ostream& out) { write_vec(out, model, composed); });
}

}  // namespace hsisg
