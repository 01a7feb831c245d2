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
#include <stdexcept>
#include <string>

namespace hsisg {

enum class ErrorCode {
  invalid_argument,
  not_hangul_syllable,
  malformed_annotation,
  io,
  utf8_decode,
  empty_corpus,
  numerical_divergence,
  bad_magic,
  bad_version,
  truncated_file,
  checksum_mismatch,
  malformed_header,
  truncated_lexicon,
  line_token_mismatch,
  non_numeric,
  malformed_mapping,
  dim_mismatch,
  zero_vector,
  undefined_correlation,
  insufficient_data,
  dataset_parse,
  interrupted,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::not_hangul_syllable: return "NotHangulSyllable";
    case ErrorCode::malformed_annotation: return "MalformedAnnotation";
    case ErrorCode::io: return "IoError";
    case ErrorCode::utf8_decode: return "Utf8DecodeError";
    case ErrorCode::empty_corpus: return "EmptyCorpus";
    case ErrorCode::numerical_divergence: return "NumericalDivergence";
    case ErrorCode::bad_magic: return "BadMagic";
    case ErrorCode::bad_version: return "BadVersion";
    case ErrorCode::truncated_file: return "TruncatedFile";
    case ErrorCode::checksum_mismatch: return "ChecksumMismatch";
    case ErrorCode::malformed_header: return "MalformedHeader";
    case ErrorCode::truncated_lexicon: return "TruncatedLexicon";
    case ErrorCode::line_token_mismatch: return "LineTokenMismatch";
    case ErrorCode::non_numeric: return "NonNumeric";
    case ErrorCode::malformed_mapping: return "MalformedMapping";
    case ErrorCode::dim_mismatch: return "DimMismatch";
    case ErrorCode::zero_vector: return "ZeroVector";
    case ErrorCode::undefined_correlation: return "UndefinedCorrelation";
    case ErrorCode::insufficient_data: return "InsufficientData";
    case ErrorCode::dataset_parse: return "DatasetParseError";
    case ErrorCode::interrupted: return "Interrupted";
  }
  return "Unknown";
}

/// Every failure raised by the library. `detail` carries the byte position,
/// line number or step index relevant to the error kind (0 when unused).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t detail = 0)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::size_t detail_;
};

}  // namespace hsisg
