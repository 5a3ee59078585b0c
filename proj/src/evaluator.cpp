#include "tokex/evaluator.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <tuple>

#include "tokex/parallel.hpp"
#include "tokex/utf8.hpp"

namespace tokex {
namespace {

void finish(FertilityReport& r) {
  r.empty = r.docs == 0;
  r.tokens_per_doc_mean = r.docs ? static_cast<double>(r.total_tokens) / r.docs : 0.0;
  r.tokens_per_word_mean =
      r.total_words ? static_cast<double>(r.total_tokens) / r.total_words : 0.0;
}

}  // namespace

std::string FertilityReport::to_json() const {
  nlohmann::ordered_json j;
  j["corpus_id"] = corpus_id;
  j["tokenizer_id"] = tokenizer_id;
  j["docs"] = docs;
  j["total_tokens"] = total_tokens;
  j["total_words"] = total_words;
  j["tokens_per_doc_mean"] = tokens_per_doc_mean;
  j["tokens_per_word_mean"] = tokens_per_word_mean;
  j["empty"] = empty;
  j["averaging"] =
      "tokens_per_doc_mean = total_tokens / docs (unweighted mean over documents); "
      "tokens_per_word_mean = total_tokens / total_words; words split on Unicode whitespace";
  return j.dump(2) + "\n";
}

FertilityReport FertilityReport::from_json(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    FertilityReport r;
    r.corpus_id = j.value("corpus_id", "");
    r.tokenizer_id = j.value("tokenizer_id", "");
    r.docs = j.at("docs").get<std::size_t>();
    r.total_tokens = j.at("total_tokens").get<std::size_t>();
    r.total_words = j.at("total_words").get<std::size_t>();
    finish(r);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("fertility report: ") + e.what());
  }
}

FertilityReport fertility(const Tokenizer& tok, const Corpus& corpus, std::string corpus_id,
                          std::string tokenizer_id, unsigned threads) {
  const auto& docs = corpus.documents;
  const unsigned shards = shard_count(docs.size(), threads);
  std::vector<std::pair<std::size_t, std::size_t>> partial(shards);
  parallel_shards(docs.size(), shards, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    std::vector<TokenId> ids;
    auto& [tokens, words] = partial[shard];
    for (std::size_t d = begin; d < end; ++d) {
      ids.clear();
      tok.encode_into(docs[d], ids);
      tokens += ids.size();
      words += utf8::count_words(docs[d]);
    }
  });

  FertilityReport r;
  r.corpus_id = std::move(corpus_id);
  r.tokenizer_id = std::move(tokenizer_id);
  r.docs = docs.size();
  for (const auto& [t, w] : partial) {
    r.total_tokens += t;
    r.total_words += w;
  }
  finish(r);
  return r;
}

FertilityReport merge_reports(const std::vector<FertilityReport>& shards) {
  FertilityReport r;
  if (!shards.empty()) {
    r.corpus_id = shards.front().corpus_id;
    r.tokenizer_id = shards.front().tokenizer_id;
  }
  for (const auto& s : shards) {
    r.docs += s.docs;
    r.total_tokens += s.total_tokens;
    r.total_words += s.total_words;
  }
  finish(r);
  return r;
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string SweepResult::to_csv() const {
  std::string out = "n_added,strategy,corpus,tokens_per_doc,tokens_per_word\n";
  for (const auto& p : points) {
    out += std::to_string(p.num_tokens_added);
    out += ',';
    out += to_string(p.strategy);
    out += ',';
    out += p.corpus_id;
    out += ',';
    out += format_real(p.tokens_per_doc);
    out += ',';
    out += format_real(p.tokens_per_word);
    out += '\n';
  }
  return out;
}

SweepResult sweep(const Tokenizer& base, const std::vector<std::string>& domain_vocab,
                  const std::vector<NamedCorpus>& corpora, const std::vector<std::size_t>& steps,
                  const std::vector<Strategy>& strategies, unsigned threads) {
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (steps[i] <= steps[i - 1]) throw ValidationError("sweep steps must be strictly ascending");
  }
  for (const auto& c : corpora) {
    if (c.id.find_first_of(",\"\n\r") != std::string::npos) {
      throw ValidationError("corpus id \"" + c.id + "\" contains a CSV delimiter");
    }
  }

  SweepResult result;
  for (const auto strategy : strategies) {
    for (const auto n : steps) {
      const auto ext = extend(base, domain_vocab, {n, strategy});
      for (const auto& c : corpora) {
        const auto f = fertility(ext.tokenizer, c.corpus, c.id, {}, threads);
        result.points.push_back(
            {n, ext.report.achieved, strategy, c.id, f.tokens_per_doc_mean, f.tokens_per_word_mean});
      }
    }
  }
  std::stable_sort(result.points.begin(), result.points.end(),
                   [](const SweepPoint& a, const SweepPoint& b) {
                     return std::make_tuple(a.num_tokens_added, to_string(a.strategy), std::string_view(a.corpus_id)) <
                            std::make_tuple(b.num_tokens_added, to_string(b.strategy), std::string_view(b.corpus_id));
                   });
  return result;
}

}  // namespace tokex
