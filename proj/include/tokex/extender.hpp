#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tokex/corpus.hpp"
#include "tokex/tokenizer.hpp"

namespace tokex {

enum class Strategy {
  kAppend,           // new merges after the base list; never worse than base
  kPrependBaseline,  // new merges ahead of the base list, in addition order
};

std::string_view to_string(Strategy s);
// Accepts "append" / "prepend". Throws ValidationError otherwise.
Strategy parse_strategy(std::string_view name);

struct ExtensionConfig {
  std::size_t num_tokens_to_add = 0;
  Strategy strategy = Strategy::kAppend;
};

enum class SkipReason {
  kAlreadyInVocab,
  kPreTokenizerSplits,
  kEncodesToOne,
  kEncodesToThreeOrMore,
};

std::string_view to_string(SkipReason r);

struct AddedToken {
  std::string token;
  TokenId id;
  // Unset when the pair was already a rule and only the vocab entry was new.
  std::optional<MergeRule> merge;
};

struct SkippedToken {
  std::string token;
  SkipReason reason;
};

struct ExtensionReport {
  std::vector<AddedToken> added;
  std::vector<SkippedToken> skipped;
  std::size_t requested = 0;
  std::size_t achieved = 0;
  Strategy strategy = Strategy::kAppend;

  std::size_t skipped_count(SkipReason r) const;
  std::string to_json() const;
};

struct ExtensionResult {
  Tokenizer tokenizer;
  ExtensionReport report;
};

// Walks `domain_vocab` (expected in descending-frequency order) and adds each
// candidate that is not yet a token, stays within one pre-token chunk and
// encodes to exactly two tokens under the tokenizer built so far; the pair
// becomes the new merge. Stops after num_tokens_to_add additions. New tokens
// take consecutive ids after the base vocabulary. Throws ValidationError on
// an empty candidate.
ExtensionResult extend(const Tokenizer& base, const std::vector<std::string>& domain_vocab,
                       const ExtensionConfig& cfg);

struct MonotonicViolation {
  std::string text;
  std::size_t base_len;
  std::size_t ext_len;
};

struct MonotonicityReport {
  std::size_t samples = 0;
  std::vector<MonotonicViolation> violations;
};

// Lists every sample whose extended encoding is longer than its base encoding.
MonotonicityReport verify_monotonic(const Tokenizer& base, const Tokenizer& ext,
                                    const Corpus& samples, unsigned threads = 1);

struct StructuralDiff {
  bool merge_prefix_preserved = false;  // base merges are a prefix of ext merges
  bool ids_stable = false;              // every base token keeps its id in ext
  std::vector<std::string> added_tokens;  // ext tokens absent from base, id order
};

StructuralDiff structural_diff(const Tokenizer& base, const Tokenizer& ext);

}  // namespace tokex
