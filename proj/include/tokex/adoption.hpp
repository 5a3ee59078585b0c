#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tokex/corpus.hpp"
#include "tokex/tokenizer.hpp"

namespace tokex {

// Next-token log-probability source. Implementations must be safe for
// concurrent const calls.
class ProbabilityOracle {
 public:
  virtual ~ProbabilityOracle() = default;
  // log P(next | context), <= 0; -infinity is allowed.
  virtual double log_prob(std::span<const TokenId> context, TokenId next) const = 0;
};

class UniformOracle final : public ProbabilityOracle {
 public:
  explicit UniformOracle(std::size_t vocab_size);
  double log_prob(std::span<const TokenId> context, TokenId next) const override;

 private:
  double log_p_;
};

// Fixed-order n-gram model with additive smoothing:
//   P(w | h) = (c(h, w) + alpha) / (c(h) + alpha * V)
// where h is the last order-1 tokens, left-padded with a start symbol at the
// beginning of a sequence. No backoff.
class NGramOracle final : public ProbabilityOracle {
 public:
  struct Config {
    std::size_t order = 3;
    double alpha = 0.1;
  };

  NGramOracle(std::size_t vocab_size, Config cfg);

  // Encodes every document with `tok` and counts its n-grams.
  static NGramOracle train(const Tokenizer& tok, const Corpus& corpus, Config cfg);

  void add_sequence(std::span<const TokenId> ids);
  double log_prob(std::span<const TokenId> context, TokenId next) const override;

  std::size_t vocab_size() const { return vocab_size_; }
  const Config& config() const { return cfg_; }

 private:
  std::string history_key(std::span<const TokenId> context) const;

  std::size_t vocab_size_;
  Config cfg_;
  std::unordered_map<std::string, std::uint64_t> history_counts_;
  std::unordered_map<std::string, std::uint64_t> ngram_counts_;
};

enum class Preference { kNew, kOld, kIdentical };

std::string_view to_string(Preference p);

struct WordDecision {
  std::string word;
  Preference preference = Preference::kIdentical;
  std::size_t new_len = 0;
  std::size_t old_len = 0;
  double new_log_prob = 0.0;
  double old_log_prob = 0.0;
};

// Scores the extended and the base segmentation of `word` by chain-rule
// log-probability after `context`. New wins only on a strictly higher score.
// Base ids are scored in the extended id space, so `ext` must keep the base
// ids. Throws ValidationError unless `word` is exactly one pre-token chunk.
WordDecision word_preference(const ProbabilityOracle& oracle, const Tokenizer& ext,
                             const Tokenizer& base, std::span<const TokenId> context,
                             std::string_view word);

struct AdoptionBucket {
  std::size_t min_words = 0;
  std::optional<std::size_t> max_words;  // exclusive; unset for the last bucket
  std::size_t n_words_evaluated = 0;
  std::size_t n_new = 0;
  std::size_t n_old = 0;
  double new_preferred_fraction = 0.0;  // n_new / n_words_evaluated, 0 when empty

  std::string label() const;
};

struct AdoptionDecision {
  std::size_t document = 0;
  std::size_t bucket = 0;
  WordDecision decision;
};

struct AdoptionReport {
  std::vector<AdoptionBucket> buckets;
  std::size_t identical_words = 0;
  std::vector<AdoptionDecision> decisions;  // filled when requested

  std::size_t total_evaluated() const;
  std::string to_json() const;
};

// Walks every document chunk by chunk with the ext-encoded prefix as context.
// Each word whose two segmentations differ adds one decision to the bucket of
// its document's word count. `boundaries` split [0, inf) into
// [0, b0), [b0, b1), ..., [bk, inf) and must be strictly ascending.
AdoptionReport adoption_scan(const ProbabilityOracle& oracle, const Tokenizer& ext,
                             const Tokenizer& base, const Corpus& corpus,
                             const std::vector<std::size_t>& boundaries,
                             bool keep_decisions = false, unsigned threads = 1);

}  // namespace tokex
