#pragma once

#include <stdexcept>
#include <string>

namespace tokex {

// Input that violates a documented contract (bad tokenizer file, bad flag
// value, out-of-range id). Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File system failures: unreadable corpus, unwritable output. Exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TokenizerErrorKind {
  kMalformedJson,
  kUnsupportedFormat,
  kInvalidTokenString,
  kInvalidVocabIds,
  kMissingByteToken,
  kMalformedMerge,
  kMergeReferencesAbsentToken,
  kMergeIdOrder,
  kDuplicateMerge,
};

const char* to_string(TokenizerErrorKind kind);

// Tokenizer validation failure. `location` names the offending JSON element,
// e.g. `merges[12]` or `vocab["Ġthe"]`.
class TokenizerError : public ValidationError {
 public:
  TokenizerError(TokenizerErrorKind kind, std::string location, const std::string& detail)
      : ValidationError(std::string(to_string(kind)) + " at " + location + ": " + detail),
        kind_(kind),
        location_(std::move(location)) {}

  TokenizerErrorKind kind() const { return kind_; }
  const std::string& location() const { return location_; }

 private:
  TokenizerErrorKind kind_;
  std::string location_;
};

}  // namespace tokex
