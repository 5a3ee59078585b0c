#include "tokex/adoption.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstring>
#include <limits>

#include "tokex/byte_map.hpp"
#include "tokex/extender.hpp"
#include "tokex/parallel.hpp"
#include "tokex/pretokenizer.hpp"
#include "tokex/utf8.hpp"

namespace tokex {

UniformOracle::UniformOracle(std::size_t vocab_size)
    : log_p_(-std::log(static_cast<double>(vocab_size))) {
  if (vocab_size == 0) throw ValidationError("uniform oracle needs a non-empty vocabulary");
}

double UniformOracle::log_prob(std::span<const TokenId>, TokenId) const { return log_p_; }

// ---- n-gram --------------------------------------------------------------

NGramOracle::NGramOracle(std::size_t vocab_size, Config cfg) : vocab_size_(vocab_size), cfg_(cfg) {
  if (cfg_.order < 1) throw ValidationError("n-gram order must be at least 1");
  if (!(cfg_.alpha > 0)) throw ValidationError("n-gram smoothing alpha must be positive");
  if (vocab_size_ == 0) throw ValidationError("n-gram oracle needs a non-empty vocabulary");
}

std::string NGramOracle::history_key(std::span<const TokenId> context) const {
  const std::size_t h = cfg_.order - 1;
  const auto start_symbol = static_cast<TokenId>(vocab_size_);
  std::string key(h * sizeof(TokenId), '\0');
  for (std::size_t i = 0; i < h; ++i) {
    // Slot i holds the token i positions before the end of the history.
    const TokenId id = i < context.size() ? context[context.size() - 1 - i] : start_symbol;
    std::memcpy(key.data() + i * sizeof(TokenId), &id, sizeof(TokenId));
  }
  return key;
}

void NGramOracle::add_sequence(std::span<const TokenId> ids) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::string key = history_key(ids.first(i));
    ++history_counts_[key];
    key.append(reinterpret_cast<const char*>(&ids[i]), sizeof(TokenId));
    ++ngram_counts_[key];
  }
}

NGramOracle NGramOracle::train(const Tokenizer& tok, const Corpus& corpus, Config cfg) {
  NGramOracle oracle(tok.vocab_size(), cfg);
  std::vector<TokenId> ids;
  for (const auto& doc : corpus.documents) {
    ids.clear();
    tok.encode_into(doc, ids);
    oracle.add_sequence(ids);
  }
  return oracle;
}

double NGramOracle::log_prob(std::span<const TokenId> context, TokenId next) const {
  std::string key = history_key(context);
  const auto h = history_counts_.find(key);
  const double history = h == history_counts_.end() ? 0.0 : static_cast<double>(h->second);
  key.append(reinterpret_cast<const char*>(&next), sizeof(TokenId));
  const auto g = ngram_counts_.find(key);
  const double joint = g == ngram_counts_.end() ? 0.0 : static_cast<double>(g->second);
  return std::log(joint + cfg_.alpha) -
         std::log(history + cfg_.alpha * static_cast<double>(vocab_size_));
}

// ---- preference ------------------------------------------------------------

std::string_view to_string(Preference p) {
  switch (p) {
    case Preference::kNew: return "new";
    case Preference::kOld: return "old";
    case Preference::kIdentical: return "identical";
  }
  return "?";
}

namespace {

// Chain-rule score of `seq` after the tokens already in `buf`; `buf` is
// restored before returning.
double sequence_log_prob(const ProbabilityOracle& oracle, std::vector<TokenId>& buf,
                         std::span<const TokenId> seq) {
  const std::size_t mark = buf.size();
  double total = 0.0;
  for (const TokenId id : seq) {
    total += oracle.log_prob(buf, id);
    buf.push_back(id);
  }
  buf.resize(mark);
  return total;
}

WordDecision decide(const ProbabilityOracle& oracle, const Tokenizer& ext, const Tokenizer& base,
                    std::vector<TokenId>& context, std::string_view word,
                    std::vector<TokenId>& new_ids) {
  std::vector<TokenId> old_ids;
  new_ids.clear();
  ext.encode_chunk(word, new_ids);
  base.encode_chunk(word, old_ids);

  WordDecision d;
  d.word = std::string(word);
  d.new_len = new_ids.size();
  d.old_len = old_ids.size();
  if (new_ids == old_ids) {
    d.preference = Preference::kIdentical;
    return d;
  }
  d.new_log_prob = sequence_log_prob(oracle, context, new_ids);
  d.old_log_prob = sequence_log_prob(oracle, context, old_ids);
  d.preference = d.new_log_prob > d.old_log_prob ? Preference::kNew : Preference::kOld;
  return d;
}

void require_stable_ids(const Tokenizer& ext, const Tokenizer& base) {
  if (!structural_diff(base, ext).ids_stable) {
    throw ValidationError("extended tokenizer does not keep the base token ids");
  }
}

}  // namespace

WordDecision word_preference(const ProbabilityOracle& oracle, const Tokenizer& ext,
                             const Tokenizer& base, std::span<const TokenId> context,
                             std::string_view word) {
  if (pre_tokenize(word).size() != 1) {
    throw ValidationError("\"" + std::string(word) + "\" is not a single pre-token chunk");
  }
  require_stable_ids(ext, base);
  std::vector<TokenId> buf(context.begin(), context.end());
  std::vector<TokenId> new_ids;
  return decide(oracle, ext, base, buf, word, new_ids);
}

// ---- scan ----------------------------------------------------------------

std::string AdoptionBucket::label() const {
  if (!max_words) return ">=" + std::to_string(min_words);
  if (min_words == 0) return "<" + std::to_string(*max_words);
  return std::to_string(min_words) + "-" + std::to_string(*max_words - 1);
}

std::size_t AdoptionReport::total_evaluated() const {
  std::size_t n = 0;
  for (const auto& b : buckets) n += b.n_words_evaluated;
  return n;
}

std::string AdoptionReport::to_json() const {
  nlohmann::ordered_json j;
  auto& bj = j["buckets"] = nlohmann::ordered_json::array();
  for (const auto& b : buckets) {
    nlohmann::ordered_json e;
    e["label"] = b.label();
    e["min_words"] = b.min_words;
    e["max_words_exclusive"] = b.max_words ? nlohmann::ordered_json(*b.max_words) : nlohmann::ordered_json(nullptr);
    e["n_words_evaluated"] = b.n_words_evaluated;
    e["n_new"] = b.n_new;
    e["n_old"] = b.n_old;
    e["new_preferred_fraction"] = b.new_preferred_fraction;
    bj.push_back(std::move(e));
  }
  j["total_evaluated"] = total_evaluated();
  j["identical_words"] = identical_words;
  j["interpretation"] =
      "a word prefers the new tokenization when the chain-rule log-probability of its extended "
      "segmentation, given the extended-tokenized document prefix, is strictly higher than that "
      "of its base segmentation; ties count as old";
  if (!decisions.empty()) {
    auto& dj = j["decisions"] = nlohmann::ordered_json::array();
    for (const auto& d : decisions) {
      dj.push_back({{"document", d.document},
                    {"bucket", d.bucket},
                    {"word", render_token(d.decision.word)},
                    {"preference", std::string(to_string(d.decision.preference))},
                    {"new_len", d.decision.new_len},
                    {"old_len", d.decision.old_len},
                    {"new_log_prob", d.decision.new_log_prob},
                    {"old_log_prob", d.decision.old_log_prob}});
    }
  }
  return j.dump(2) + "\n";
}

AdoptionReport adoption_scan(const ProbabilityOracle& oracle, const Tokenizer& ext,
                             const Tokenizer& base, const Corpus& corpus,
                             const std::vector<std::size_t>& boundaries, bool keep_decisions,
                             unsigned threads) {
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if (boundaries[i] == 0 || (i > 0 && boundaries[i] <= boundaries[i - 1])) {
      throw ValidationError("bucket boundaries must be positive and strictly ascending");
    }
  }
  require_stable_ids(ext, base);

  AdoptionReport report;
  std::size_t lo = 0;
  for (const auto b : boundaries) {
    report.buckets.push_back({lo, b});
    lo = b;
  }
  report.buckets.push_back({lo, std::nullopt});

  const auto bucket_of = [&](std::size_t words) {
    std::size_t i = 0;
    while (i < boundaries.size() && words >= boundaries[i]) ++i;
    return i;
  };

  struct Partial {
    std::vector<std::size_t> n_new, n_old;
    std::size_t identical = 0;
    std::vector<AdoptionDecision> decisions;
  };
  const auto& docs = corpus.documents;
  const unsigned shards = shard_count(docs.size(), threads);
  std::vector<Partial> partial(shards);
  parallel_shards(docs.size(), shards, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    Partial& p = partial[shard];
    p.n_new.assign(report.buckets.size(), 0);
    p.n_old.assign(report.buckets.size(), 0);
    std::vector<TokenId> context, new_ids;
    for (std::size_t d = begin; d < end; ++d) {
      const std::size_t bucket = bucket_of(utf8::count_words(docs[d]));
      context.clear();
      for_each_chunk(docs[d], [&](std::string_view chunk) {
        if (chunk.size() == 1 && is_ws_byte(chunk[0])) {
          ext.encode_chunk(chunk, context);
          return;
        }
        auto decision = decide(oracle, ext, base, context, chunk, new_ids);
        switch (decision.preference) {
          case Preference::kIdentical: ++p.identical; break;
          case Preference::kNew: ++p.n_new[bucket]; break;
          case Preference::kOld: ++p.n_old[bucket]; break;
        }
        if (keep_decisions && decision.preference != Preference::kIdentical) {
          p.decisions.push_back({d, bucket, std::move(decision)});
        }
        context.insert(context.end(), new_ids.begin(), new_ids.end());
      });
    }
  });

  for (auto& p : partial) {
    for (std::size_t b = 0; b < report.buckets.size(); ++b) {
      report.buckets[b].n_new += p.n_new[b];
      report.buckets[b].n_old += p.n_old[b];
    }
    report.identical_words += p.identical;
    for (auto& d : p.decisions) report.decisions.push_back(std::move(d));
  }
  for (auto& b : report.buckets) {
    b.n_words_evaluated = b.n_new + b.n_old;
    b.new_preferred_fraction =
        b.n_words_evaluated ? static_cast<double>(b.n_new) / b.n_words_evaluated : 0.0;
  }
  return report;
}

}  // namespace tokex
