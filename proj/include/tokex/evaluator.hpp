#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tokex/corpus.hpp"
#include "tokex/extender.hpp"
#include "tokex/tokenizer.hpp"

namespace tokex {

struct FertilityReport {
  std::string corpus_id;
  std::string tokenizer_id;
  std::size_t docs = 0;
  std::size_t total_tokens = 0;
  std::size_t total_words = 0;
  // total_tokens / docs, i.e. the unweighted mean of per-document counts.
  double tokens_per_doc_mean = 0.0;
  // total_tokens / total_words.
  double tokens_per_word_mean = 0.0;
  // No documents; both means are 0.
  bool empty = true;

  std::string to_json() const;
  static FertilityReport from_json(std::string_view json_text);
};

// Words are maximal runs of non-whitespace code points (Unicode White_Space).
FertilityReport fertility(const Tokenizer& tok, const Corpus& corpus, std::string corpus_id = {},
                          std::string tokenizer_id = {}, unsigned threads = 1);

// Combines reports over disjoint shards of one corpus.
FertilityReport merge_reports(const std::vector<FertilityReport>& shards);

struct NamedCorpus {
  std::string id;
  Corpus corpus;
};

struct SweepPoint {
  std::size_t num_tokens_added = 0;  // the requested step
  std::size_t achieved = 0;          // tokens the extender actually added
  Strategy strategy = Strategy::kAppend;
  std::string corpus_id;
  double tokens_per_doc = 0.0;
  double tokens_per_word = 0.0;
};

struct SweepResult {
  // Ordered by (num_tokens_added, strategy name, corpus_id).
  std::vector<SweepPoint> points;

  // Header `n_added,strategy,corpus,tokens_per_doc,tokens_per_word`; reals in
  // shortest round-trip form.
  std::string to_csv() const;
};

// One extension per (step, strategy), measured on every corpus. Steps must be
// strictly ascending.
SweepResult sweep(const Tokenizer& base, const std::vector<std::string>& domain_vocab,
                  const std::vector<NamedCorpus>& corpora, const std::vector<std::size_t>& steps,
                  const std::vector<Strategy>& strategies, unsigned threads = 1);

// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

}  // namespace tokex
