#include "tokex/trainer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <queue>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "tokex/byte_map.hpp"
#include "tokex/parallel.hpp"
#include "tokex/pretokenizer.hpp"

namespace tokex {
namespace {

std::uint64_t pair_key(TokenId l, TokenId r) { return (static_cast<std::uint64_t>(l) << 32) | r; }
TokenId key_left(std::uint64_t k) { return static_cast<TokenId>(k >> 32); }
TokenId key_right(std::uint64_t k) { return static_cast<TokenId>(k & 0xFFFFFFFFu); }

struct Word {
  std::vector<TokenId> symbols;
  std::uint64_t count = 0;
  std::size_t last_visit = 0;
};

struct HeapEntry {
  std::uint64_t count;
  std::uint64_t key;
};

class PairTrainer {
 public:
  PairTrainer(const Corpus& corpus, const TrainingConfig& cfg) : cfg_(cfg) {
    for (unsigned b = 0; b < 256; ++b) add_token(std::string(1, static_cast<char>(b)));

    std::unordered_map<std::string_view, std::uint64_t> chunk_counts;
    for (const auto& doc : corpus.documents) {
      for_each_chunk(doc, [&](std::string_view c) { ++chunk_counts[c]; });
    }
    std::vector<std::pair<std::string_view, std::uint64_t>> sorted(chunk_counts.begin(),
                                                                   chunk_counts.end());
    std::sort(sorted.begin(), sorted.end());
    words_.reserve(sorted.size());
    for (const auto& [chunk, count] : sorted) {
      Word w;
      w.count = count;
      w.symbols.reserve(chunk.size());
      for (const char c : chunk) w.symbols.push_back(static_cast<unsigned char>(c));
      words_.push_back(std::move(w));
    }

    for (std::uint32_t wi = 0; wi < words_.size(); ++wi) {
      const auto& w = words_[wi];
      for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
        const auto k = pair_key(w.symbols[i], w.symbols[i + 1]);
        counts_[k] += w.count;
        where_[k].push_back(wi);
      }
    }
    for (const auto& [k, c] : counts_) heap_.push({c, k});
  }

  TrainResult run() {
    TrainResult result{Tokenizer::byte_level(), {}, true, {}};
    std::size_t step = 0;
    while (tokens_.size() < cfg_.target_vocab_size) {
      const auto best = pop_best();
      if (!best) {
        result.target_reached = false;
        result.warning = "no mergeable pairs left";
        break;
      }
      if (best->count < cfg_.min_pair_frequency) {
        result.target_reached = false;
        result.warning = "best remaining pair occurs " + std::to_string(best->count) +
                         " times, below min_pair_frequency";
        break;
      }
      apply(best->key, ++step);
    }
    if (!result.target_reached) {
      result.warning = "target vocab size " + std::to_string(cfg_.target_vocab_size) +
                       " not reached (got " + std::to_string(tokens_.size()) + "): " +
                       result.warning;
    }
    result.tokenizer = Tokenizer(tokens_, merges_);
    return result;
  }

 private:
  void add_token(std::string t) {
    ids_.emplace(t, static_cast<TokenId>(tokens_.size()));
    tokens_.push_back(std::move(t));
  }

  // Higher count first; equal counts by (left bytes, right bytes) ascending.
  bool worse(const HeapEntry& a, const HeapEntry& b) const {
    if (a.count != b.count) return a.count < b.count;
    const auto& al = tokens_[key_left(a.key)];
    const auto& bl = tokens_[key_left(b.key)];
    if (al != bl) return al > bl;
    return tokens_[key_right(a.key)] > tokens_[key_right(b.key)];
  }

  std::optional<HeapEntry> pop_best() {
    while (!heap_.empty()) {
      const HeapEntry top = heap_.top();
      heap_.pop();
      const auto it = counts_.find(top.key);
      if (it == counts_.end() || it->second != top.count || top.count == 0) continue;
      if (banned_.count(top.key)) continue;
      const auto out = tokens_[key_left(top.key)] + tokens_[key_right(top.key)];
      if (ids_.count(out)) {
        banned_.insert(top.key);
        continue;
      }
      return top;
    }
    return std::nullopt;
  }

  void apply(std::uint64_t key, std::size_t step) {
    const TokenId left = key_left(key);
    const TokenId right = key_right(key);
    merges_.push_back({tokens_[left], tokens_[right]});
    const auto merged = static_cast<TokenId>(tokens_.size());
    add_token(tokens_[left] + tokens_[right]);

    std::unordered_set<std::uint64_t> touched;
    const auto occurrences = where_[key];  // copy: where_ grows below
    for (const std::uint32_t wi : occurrences) {
      Word& w = words_[wi];
      if (w.last_visit == step) continue;
      w.last_visit = step;

      auto& syms = w.symbols;
      bool present = false;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        if (syms[i] == left && syms[i + 1] == right) {
          present = true;
          break;
        }
      }
      if (!present) continue;

      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        const auto k = pair_key(syms[i], syms[i + 1]);
        counts_[k] -= w.count;
        touched.insert(k);
      }
      std::vector<TokenId> next;
      next.reserve(syms.size());
      for (std::size_t i = 0; i < syms.size();) {
        if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
          next.push_back(merged);
          i += 2;
        } else {
          next.push_back(syms[i++]);
        }
      }
      syms = std::move(next);
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        const auto k = pair_key(syms[i], syms[i + 1]);
        counts_[k] += w.count;
        touched.insert(k);
        if (syms[i] == merged || syms[i + 1] == merged) where_[k].push_back(wi);
      }
    }
    where_.erase(key);
    for (const auto k : touched) {
      const auto c = counts_[k];
      if (c == 0) {
        counts_.erase(k);
      } else {
        heap_.push({c, k});
      }
    }
  }

  struct Worse {
    const PairTrainer* self;
    bool operator()(const HeapEntry& a, const HeapEntry& b) const { return self->worse(a, b); }
  };

  TrainingConfig cfg_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
  std::vector<MergeRule> merges_;
  std::vector<Word> words_;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where_;
  std::unordered_set<std::uint64_t> banned_;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, Worse> heap_{Worse{this}};
};

}  // namespace

TrainResult train(const Corpus& corpus, const TrainingConfig& cfg) {
  if (cfg.target_vocab_size < 257) {
    throw ValidationError("target vocab size must be at least 257, got " +
                          std::to_string(cfg.target_vocab_size));
  }
  if (cfg.min_pair_frequency < 1) throw ValidationError("min pair frequency must be at least 1");
  if (corpus.total_bytes() == 0) throw ValidationError("empty corpus: " + corpus.source);

  TrainResult result = PairTrainer(corpus, cfg).run();
  result.frequencies = token_frequencies(result.tokenizer, corpus);
  return result;
}

FrequencyTable token_frequencies(const Tokenizer& tok, const Corpus& corpus, unsigned threads) {
  const auto& docs = corpus.documents;
  const unsigned shards = shard_count(docs.size(), threads);
  std::vector<FrequencyTable> partial(shards, FrequencyTable(tok.vocab_size(), 0));
  parallel_shards(docs.size(), shards, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    auto& counts = partial[shard];
    std::vector<TokenId> ids;
    for (std::size_t d = begin; d < end; ++d) {
      ids.clear();
      tok.encode_into(docs[d], ids);
      for (const auto id : ids) ++counts[id];
    }
  });
  FrequencyTable total(tok.vocab_size(), 0);
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += p[i];
  }
  return total;
}

std::vector<std::string> rank_by_frequency(const Tokenizer& tok, const FrequencyTable& freqs) {
  if (freqs.size() != tok.vocab_size()) {
    throw ValidationError("frequency table size does not match vocabulary");
  }
  std::vector<TokenId> order(tok.vocab_size());
  for (TokenId i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
    if (freqs[a] != freqs[b]) return freqs[a] > freqs[b];
    return tok.token(a) < tok.token(b);
  });
  std::vector<std::string> ranked;
  ranked.reserve(order.size());
  for (const auto id : order) ranked.push_back(tok.token(id));
  return ranked;
}

std::string frequencies_to_json(const Tokenizer& tok, const FrequencyTable& freqs) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (TokenId id = 0; id < tok.vocab_size(); ++id) {
    j[render_token(tok.token(id))] = id < freqs.size() ? freqs[id] : 0;
  }
  return j.dump(2) + "\n";
}

FrequencyTable frequencies_from_json(const Tokenizer& tok, std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("frequency file: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("frequency file: top level is not an object");
  FrequencyTable freqs(tok.vocab_size(), 0);
  for (const auto& [key, value] : j.items()) {
    const auto bytes = parse_token(key);
    const auto id = bytes ? tok.find(*bytes) : std::nullopt;
    if (!id) throw ValidationError("frequency file: token \"" + key + "\" not in vocabulary");
    if (!value.is_number_unsigned()) {
      throw ValidationError("frequency file: count for \"" + key + "\" is not a non-negative integer");
    }
    freqs[*id] = value.get<std::uint64_t>();
  }
  return freqs;
}

}  // namespace tokex
