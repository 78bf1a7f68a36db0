/*
 * Copyright 2026 The isaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ISAUDIT_ERROR_HPP_
#define ISAUDIT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace isaudit {

enum class ErrorKind {
  kUnknownAxis,
  kUnknownAttribute,
  kDuplicateImageId,
  kEmptyVariant,
  kUnknownVariant,
  kInvalidSchema,
  kEmptyCounts,
  kAxisMismatch,
  kNonIntervenableAxis,
  kSameAxis,
  kLengthMismatch,
  kZeroVariance,
  kMissingAxisInSpec,
  kEmptyMatrix,
  kSchemaMismatch,
  kKeepCountTooLarge,
  kInvalidArgument,
  kInvalidNetwork,
  kStateSpaceTooLarge,
  kParseError,
  kSchemaVersionError,
  kIoError,
};

inline std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnknownAxis: return "UnknownAxis";
    case ErrorKind::kUnknownAttribute: return "UnknownAttribute";
    case ErrorKind::kDuplicateImageId: return "DuplicateImageId";
    case ErrorKind::kEmptyVariant: return "EmptyVariant";
    case ErrorKind::kUnknownVariant: return "UnknownVariant";
    case ErrorKind::kInvalidSchema: return "InvalidSchema";
    case ErrorKind::kEmptyCounts: return "EmptyCounts";
    case ErrorKind::kAxisMismatch: return "AxisMismatch";
    case ErrorKind::kNonIntervenableAxis: return "NonIntervenableAxis";
    case ErrorKind::kSameAxis: return "SameAxis";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kZeroVariance: return "ZeroVariance";
    case ErrorKind::kMissingAxisInSpec: return "MissingAxisInSpec";
    case ErrorKind::kEmptyMatrix: return "EmptyMatrix";
    case ErrorKind::kSchemaMismatch: return "SchemaMismatch";
    case ErrorKind::kKeepCountTooLarge: return "KeepCountTooLarge";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kInvalidNetwork: return "InvalidNetwork";
    case ErrorKind::kStateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kSchemaVersionError: return "SchemaVersionError";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

// All library failures are reported through this exception. The kind is
// stable and meant for programmatic dispatch; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // I/O failures map to a distinct process exit status in the CLI.
  bool is_io() const noexcept { return kind_ == ErrorKind::kIoError; }

 private:
  ErrorKind kind_;
};

}  // namespace isaudit

#endif  // ISAUDIT_ERROR_HPP_
