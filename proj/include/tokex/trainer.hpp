#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tokex/corpus.hpp"
#include "tokex/tokenizer.hpp"

namespace tokex {

struct TrainingConfig {
  std::size_t target_vocab_size = 0;   // >= 257
  std::uint64_t min_pair_frequency = 2;  // >= 1
};

// Occurrence count per token id of a specific tokenizer.
using FrequencyTable = std::vector<std::uint64_t>;

struct TrainResult {
  Tokenizer tokenizer;
  // Counts under the final segmentation of the training corpus.
  FrequencyTable frequencies;
  bool target_reached = true;
  std::string warning;
};

// Learns merges by repeatedly joining the most frequent adjacent pair inside
// pre-token chunks. Ties go to the lexicographically smaller
// (left bytes, right bytes). Stops at the target size, when the best pair
// falls under min_pair_frequency, or when no pairs remain; the last two set
// target_reached = false. Pairs whose concatenation is already a token are
// never merged. Throws ValidationError for an empty corpus or bad config.
TrainResult train(const Corpus& corpus, const TrainingConfig& cfg);

FrequencyTable token_frequencies(const Tokenizer& tok, const Corpus& corpus, unsigned threads = 1);

// Token strings ordered by descending count, ties by ascending bytes.
std::vector<std::string> rank_by_frequency(const Tokenizer& tok, const FrequencyTable& freqs);

// {"<rendered token>": count, ...} in id order.
std::string frequencies_to_json(const Tokenizer& tok, const FrequencyTable& freqs);
// Tokens absent from the file count 0; unknown tokens are a ValidationError.
FrequencyTable frequencies_from_json(const Tokenizer& tok, std::string_view json_text);

}  // namespace tokex
