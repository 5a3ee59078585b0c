#include "tokex/extender.hpp"

#include <nlohmann/json.hpp>

#include <unordered_map>
#include <unordered_set>

#include "tokex/byte_map.hpp"
#include "tokex/parallel.hpp"
#include "tokex/pretokenizer.hpp"

namespace tokex {

std::string_view to_string(Strategy s) {
  return s == Strategy::kAppend ? "append" : "prepend";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "append") return Strategy::kAppend;
  if (name == "prepend") return Strategy::kPrependBaseline;
  throw ValidationError("unknown strategy \"" + std::string(name) + "\" (expected append|prepend)");
}

std::string_view to_string(SkipReason r) {
  switch (r) {
    case SkipReason::kAlreadyInVocab: return "AlreadyInVocab";
    case SkipReason::kPreTokenizerSplits: return "PreTokenizerSplits";
    case SkipReason::kEncodesToOne: return "EncodesToOne";
    case SkipReason::kEncodesToThreeOrMore: return "EncodesToThreeOrMore";
  }
  return "?";
}

std::size_t ExtensionReport::skipped_count(SkipReason r) const {
  std::size_t n = 0;
  for (const auto& s : skipped) n += s.reason == r;
  return n;
}

std::string ExtensionReport::to_json() const {
  nlohmann::ordered_json j;
  j["strategy"] = std::string(tokex::to_string(strategy));
  j["requested"] = requested;
  j["achieved"] = achieved;
  auto& counts = j["skipped_counts"] = nlohmann::ordered_json::object();
  for (const auto r : {SkipReason::kAlreadyInVocab, SkipReason::kPreTokenizerSplits,
                       SkipReason::kEncodesToOne, SkipReason::kEncodesToThreeOrMore}) {
    counts[std::string(tokex::to_string(r))] = skipped_count(r);
  }
  auto& added_j = j["added"] = nlohmann::ordered_json::array();
  for (const auto& a : added) {
    nlohmann::ordered_json e;
    e["token"] = render_token(a.token);
    e["id"] = a.id;
    if (a.merge) {
      e["merge"] = render_token(a.merge->left) + " " + render_token(a.merge->right);
    } else {
      e["merge"] = nullptr;
    }
    added_j.push_back(std::move(e));
  }
  auto& skipped_j = j["skipped"] = nlohmann::ordered_json::array();
  for (const auto& s : skipped) {
    skipped_j.push_back({{"token", render_token(s.token)}, {"reason", std::string(tokex::to_string(s.reason))}});
  }
  return j.dump(2) + "\n";
}

namespace {

// Growable copy of a tokenizer that the extender re-encodes candidates with.
class WorkingTokenizer {
 public:
  explicit WorkingTokenizer(const Tokenizer& base)
      : tokens_(base.tokens()), merges_(base.merges().begin(), base.merges().end()) {
    ids_.reserve(tokens_.size());
    for (TokenId id = 0; id < tokens_.size(); ++id) ids_.emplace(tokens_[id], id);
    for (unsigned b = 0; b < 256; ++b) byte_ids_[b] = ids_.at(std::string(1, static_cast<char>(b)));
    for (std::size_t i = 0; i < merges_.size(); ++i) {
      const auto& m = merges_[i];
      table_.insert(ids_.at(m.left), ids_.at(m.right),
                    {static_cast<std::int64_t>(i), ids_.at(m.output())});
    }
  }

  bool contains(const std::string& t) const { return ids_.count(t) != 0; }

  std::vector<TokenId> encode_chunk(std::string_view chunk) const {
    std::vector<TokenId> out;
    detail::encode_chunk(table_, byte_ids_, chunk, out);
    return out;
  }

  const std::string& token(TokenId id) const { return tokens_[id]; }

  TokenId add_token(const std::string& t) {
    const auto id = static_cast<TokenId>(tokens_.size());
    tokens_.push_back(t);
    ids_.emplace(t, id);
    return id;
  }

  // Returns false when the pair already has a rule.
  bool add_merge(TokenId left, TokenId right, TokenId output, Strategy strategy) {
    std::int64_t priority = 0;
    if (strategy == Strategy::kAppend) {
      priority = static_cast<std::int64_t>(merges_.size());
    } else {
      // Head insertions in addition order: all below 0, increasing.
      priority = kPrependBase + static_cast<std::int64_t>(++prepended_);
    }
    if (!table_.insert(left, right, {priority, output})) return false;
    if (strategy == Strategy::kAppend) {
      merges_.push_back({tokens_[left], tokens_[right]});
    } else {
      head_.push_back({tokens_[left], tokens_[right]});
    }
    return true;
  }

  Tokenizer build() && {
    std::vector<MergeRule> merges(head_.begin(), head_.end());
    merges.insert(merges.end(), merges_.begin(), merges_.end());
    return Tokenizer(std::move(tokens_), std::move(merges));
  }

 private:
  static constexpr std::int64_t kPrependBase = -(std::int64_t{1} << 40);

  std::vector<std::string> tokens_;
  std::vector<MergeRule> merges_;
  std::vector<MergeRule> head_;
  std::int64_t prepended_ = 0;
  std::unordered_map<std::string, TokenId> ids_;
  detail::MergeTable table_;
  detail::ByteIds byte_ids_{};
};

}  // namespace

ExtensionResult extend(const Tokenizer& base, const std::vector<std::string>& domain_vocab,
                       const ExtensionConfig& cfg) {
  for (std::size_t i = 0; i < domain_vocab.size(); ++i) {
    if (domain_vocab[i].empty()) {
      throw ValidationError("domain vocabulary entry " + std::to_string(i) + " is empty");
    }
  }

  ExtensionReport report;
  report.requested = cfg.num_tokens_to_add;
  report.strategy = cfg.strategy;
  if (cfg.num_tokens_to_add == 0) return {base, std::move(report)};

  WorkingTokenizer work(base);
  for (const auto& t : domain_vocab) {
    if (work.contains(t)) {
      report.skipped.push_back({t, SkipReason::kAlreadyInVocab});
      continue;
    }
    if (pre_tokenize(t).size() > 1) {
      report.skipped.push_back({t, SkipReason::kPreTokenizerSplits});
      continue;
    }
    const auto enc = work.encode_chunk(t);
    if (enc.size() != 2) {
      report.skipped.push_back(
          {t, enc.size() < 2 ? SkipReason::kEncodesToOne : SkipReason::kEncodesToThreeOrMore});
      continue;
    }
    const TokenId id = work.add_token(t);
    std::optional<MergeRule> merge;
    if (work.add_merge(enc[0], enc[1], id, cfg.strategy)) {
      merge = MergeRule{work.token(enc[0]), work.token(enc[1])};
    }
    report.added.push_back({t, id, std::move(merge)});
    if (report.added.size() >= cfg.num_tokens_to_add) break;
  }
  report.achieved = report.added.size();
  return {std::move(work).build(), std::move(report)};
}

MonotonicityReport verify_monotonic(const Tokenizer& base, const Tokenizer& ext,
                                    const Corpus& samples, unsigned threads) {
  const auto& docs = samples.documents;
  const unsigned shards = shard_count(docs.size(), threads);
  std::vector<std::vector<MonotonicViolation>> partial(shards);
  parallel_shards(docs.size(), shards, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    std::vector<TokenId> a, b;
    for (std::size_t i = begin; i < end; ++i) {
      a.clear();
      b.clear();
      base.encode_into(docs[i], a);
      ext.encode_into(docs[i], b);
      if (b.size() > a.size()) partial[shard].push_back({docs[i], a.size(), b.size()});
    }
  });
  MonotonicityReport report;
  report.samples = docs.size();
  for (auto& p : partial) {
    for (auto& v : p) report.violations.push_back(std::move(v));
  }
  return report;
}

StructuralDiff structural_diff(const Tokenizer& base, const Tokenizer& ext) {
  StructuralDiff diff;
  const auto& bm = base.merges();
  const auto& em = ext.merges();
  diff.merge_prefix_preserved =
      bm.size() <= em.size() && std::equal(bm.begin(), bm.end(), em.begin());

  diff.ids_stable = true;
  for (TokenId id = 0; id < base.vocab_size(); ++id) {
    const auto e = ext.find(base.token(id));
    if (!e || *e != id) {
      diff.ids_stable = false;
      break;
    }
  }
  for (TokenId id = 0; id < ext.vocab_size(); ++id) {
    if (!base.contains(ext.token(id))) diff.added_tokens.push_back(ext.token(id));
  }
  return diff;
}

}  // namespace tokex
