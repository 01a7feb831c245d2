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

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "hsisg/error.hpp"

namespace hsisg {

/// Writes through a temporary sibling file and renames it into place, so
/// `path` is either untouched or complete.
inline void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  auto tmp = path;
  tmp += ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::io, "cannot open '" + tmp.string() + "' for writing");
      body(out);
      out.flush();
      if (!out) throw Error(ErrorCode::io, "write failure on '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::io, "cannot rename to '" + path.string() + "': " + ec.message());
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw;
  }
}

inline std::string format_g(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

/// Round-trippable decimal form of a double.
inline std::string format_exact(double value) { return format_g(value, 17); }

using KeyValues = std::vector<std::pair<std::string, std::string>>;

inline void write_key_values(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv) out << k << '\t' << v << '\n';
}

inline KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::dataset_parse, "line " + std::to_string(lineno) + ": expected key<TAB>value", lineno);
    }
    kv.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return kv;
}

inline std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t start = line.find_first_not_of(' ', pos);
    if (start == std::string_view::npos) break;
    std::size_t stop = line.find(' ', start);
    if (stop == std::string_view::npos) stop = line.size();
    out.push_back(line.substr(start, stop - start));
    pos = stop;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

/// Contents of a word2vec text file: header "N d", then N lines of a key
/// followed by d numbers.
template <class T>
struct VecFile {
  std::uint32_t dim = 0;
  std::vector<std::pair<std::string, std::vector<T>>> rows;
};

template <class T>
VecFile<T> parse_vec(std::istream& in, const std::string& name) {
  auto where = [&](std::size_t lineno) { return name + ":" + std::to_string(lineno) + ": "; };
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::malformed_header, where(1) + "missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto head = split_spaces(line);
  std::uint64_t n = 0;
  VecFile<T> file;
  if (head.size() != 2 || !parse_number(head[0], n) || !parse_number(head[1], file.dim) || file.dim == 0) {
    throw Error(ErrorCode::malformed_header, where(1) + "expected 'count dim'", 1);
  }
  file.rows.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::size_t lineno = static_cast<std::size_t>(i) + 2;
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::truncated_lexicon,
                  where(lineno) + "header announces " + std::to_string(n) + " rows, found " + std::to_string(i),
                  lineno);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_spaces(line);
    if (fields.size() != file.dim + 1) {
      throw Error(ErrorCode::line_token_mismatch,
                  where(lineno) + "expected " + std::to_string(file.dim + 1) + " fields, found " +
                      std::to_string(fields.size()),
                  lineno);
    }
    std::vector<T> values(file.dim);
    for (std::uint32_t k = 0; k < file.dim; ++k) {
      if (!parse_number(fields[k + 1], values[k])) {
        throw Error(ErrorCode::non_numeric, where(lineno) + "non-numeric value '" + std::string(fields[k + 1]) + "'",
                    lineno);
      }
    }
    file.rows.emplace_back(std::string(fields[0]), std::move(values));
  }
  return file;
}

template <class T>
VecFile<T> load_vec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  return parse_vec<T>(in, path.string());
}

}  // namespace hsisg
