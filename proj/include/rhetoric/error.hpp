// Copyright 2026 The Rhetoric Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rhetoric {

/// Every failure the library reports is an `Error` carrying one of these kinds.
enum class ErrorKind {
  // llm-gateway
  UnknownTemplate,
  MissingBinding,
  Transport,
  RateLimited,
  Auth,
  // parsing of model replies
  ParseFailure,
  // stance generation
  InsufficientVotes,
  MissingTiebreaker,
  // persona annotation
  InvalidTables,
  OutOfRange,
  TooFewRaters,
  // metrics
  DegenerateInput,
  LengthMismatch,
  EmptyInput,
  NoQualifyingPairs,
  InsufficientOverlap,
  MissingCondition,
  // dataset
  TooFewRecords,
  InsufficientPoliticalTopics,
  SchemaViolation,
  IO,
  // analysis
  ScorerUnavailable,
  MissingParty,
  // generic
  InvalidArgument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownTemplate: return "UnknownTemplate";
    case ErrorKind::MissingBinding: return "MissingBinding";
    case ErrorKind::Transport: return "Transport";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::Auth: return "Auth";
    case ErrorKind::ParseFailure: return "ParseFailure";
    case ErrorKind::InsufficientVotes: return "InsufficientVotes";
    case ErrorKind::MissingTiebreaker: return "MissingTiebreaker";
    case ErrorKind::InvalidTables: return "InvalidTables";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::TooFewRaters: return "TooFewRaters";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NoQualifyingPairs: return "NoQualifyingPairs";
    case ErrorKind::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorKind::MissingCondition: return "MissingCondition";
    case ErrorKind::TooFewRecords: return "TooFewRecords";
    case ErrorKind::InsufficientPoliticalTopics: return "InsufficientPoliticalTopics";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::IO: return "IO";
    case ErrorKind::ScorerUnavailable: return "ScorerUnavailable";
    case ErrorKind::MissingParty: return "MissingParty";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
        kind_(kind),
        detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The subject of the error (template id, topic id, rater id, ...).
  const std::string& detail() const noexcept { return detail_; }

  /// Transport failures may be retried by the gateway; set by backends.
  bool retryable() const noexcept { return retryable_; }
  Error& set_retryable(bool r) noexcept {
    retryable_ = r;
    return *this;
  }

 private:
  ErrorKind kind_;
  std::string detail_;
  bool retryable_ = false;
};

/// SchemaViolation with the offending 1-based line number.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line_no, const std::string& what)
      : Error(ErrorKind::SchemaViolation,
              "line " + std::to_string(line_no) + ": " + what),
        line_no_(line_no) {}
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

}  // namespace rhetoric
