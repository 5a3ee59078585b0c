#include "cli.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "tokex/adoption.hpp"
#include "tokex/byte_map.hpp"
#include "tokex/cost_model.hpp"
#include "tokex/embeddings.hpp"
#include "tokex/evaluator.hpp"
#include "tokex/extender.hpp"
#include "tokex/io.hpp"
#include "tokex/parallel.hpp"
#include "tokex/trainer.hpp"
#include "tokex/utf8.hpp"

namespace tokex::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

// Writes to `path` when given, otherwise to stdout.
void emit(std::ostream& out, const std::string& path, const std::string& contents) {
  if (path.empty()) {
    out << contents;
  } else {
    write_file(path, contents);
  }
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<std::size_t> parse_sizes(const std::string& s, const char* what) {
  std::vector<std::size_t> out;
  for (const auto& p : split_list(s)) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(p, &used);
      if (used != p.size() || v < 0) throw std::invalid_argument(p);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw ValidationError(std::string("bad ") + what + " value \"" + p + "\"");
    }
  }
  return out;
}

struct Domain {
  Tokenizer tokenizer;
  std::vector<std::string> ranked;
};

Domain load_domain(const std::string& tok_path, const std::string& freqs_path) {
  auto tok = Tokenizer::load(tok_path);
  const auto freqs = frequencies_from_json(tok, read_file(freqs_path));
  auto ranked = rank_by_frequency(tok, freqs);
  return {std::move(tok), std::move(ranked)};
}

class Commands {
 public:
  Commands(CLI::App& app, std::ostream& out, std::ostream& err) : out_(out), err_(err) {
    app.add_option("--threads", threads_, "worker threads (default: $TOKEX_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    add_train(app);
    add_extend(app);
    add_encode(app);
    add_decode(app);
    add_fertility(app);
    add_sweep(app);
    add_init_embeddings(app);
    add_costmodel(app);
    add_adoption(app);
    add_verify(app);
  }

  void run(CLI::App& app) {
    if (threads_ == 0) threads_ = default_threads();
    for (auto& [sub, handler] : handlers_) {
      if (app.got_subcommand(sub)) {
        handler();
        return;
      }
    }
  }

 private:
  CLI::App* sub(CLI::App& app, const std::string& name, const std::string& desc,
                std::function<void()> handler) {
    auto* s = app.add_subcommand(name, desc);
    s->fallthrough();
    handlers_.emplace_back(s, std::move(handler));
    return s;
  }

  void add_train(CLI::App& app) {
    auto* s = sub(app, "train", "train a byte-level BPE tokenizer on a corpus", [this] {
      const auto corpus = load_corpus(train_.corpus);
      auto result = train(corpus, {train_.vocab_size, train_.min_pair_freq});
      result.tokenizer.save(train_.out);
      if (!train_.freqs.empty()) {
        write_file(train_.freqs, frequencies_to_json(result.tokenizer, result.frequencies));
      }
      if (!result.target_reached) err_ << "warning: " << result.warning << "\n";
      ordered_json j;
      j["vocab_size"] = result.tokenizer.vocab_size();
      j["merges"] = result.tokenizer.merges().size();
      j["target_reached"] = result.target_reached;
      j["warning"] = result.warning;
      out_ << dump(j);
    });
    s->add_option("--corpus", train_.corpus, "corpus file or directory")->required();
    s->add_option("--vocab-size", train_.vocab_size, "target vocabulary size (>= 257)")->required();
    s->add_option("--min-pair-freq", train_.min_pair_freq, "minimum pair count to merge")
        ->capture_default_str();
    s->add_option("--out", train_.out, "tokenizer JSON to write")->required();
    s->add_option("--freqs", train_.freqs, "token frequency JSON to write");
  }

  void add_extend(CLI::App& app) {
    auto* s = sub(app, "extend", "append in-domain tokens to a base tokenizer", [this] {
      const auto base = Tokenizer::load(extend_.base);
      const auto domain = load_domain(extend_.domain_tok, extend_.domain_freqs);
      const auto result = extend(base, domain.ranked,
                                 {extend_.num_tokens, parse_strategy(extend_.strategy)});
      result.tokenizer.save(extend_.out);
      if (!extend_.report.empty()) write_file(extend_.report, result.report.to_json());
      ordered_json j;
      j["strategy"] = extend_.strategy;
      j["requested"] = result.report.requested;
      j["achieved"] = result.report.achieved;
      j["vocab_size"] = result.tokenizer.vocab_size();
      out_ << dump(j);
    });
    s->add_option("--base", extend_.base, "base tokenizer JSON")->required();
    s->add_option("--domain-tok", extend_.domain_tok, "in-domain tokenizer JSON")->required();
    s->add_option("--domain-freqs", extend_.domain_freqs, "in-domain token frequencies")->required();
    s->add_option("--num-tokens", extend_.num_tokens, "number of tokens to add")->required();
    s->add_option("--strategy", extend_.strategy, "append|prepend")->capture_default_str();
    s->add_option("--out", extend_.out, "extended tokenizer JSON to write")->required();
    s->add_option("--report", extend_.report, "extension report JSON to write");
  }

  void add_encode(CLI::App& app) {
    auto* s = sub(app, "encode", "encode text to token ids", [this] {
      const auto tok = Tokenizer::load(encode_.tokenizer);
      const std::string text = encode_.input.empty() ? encode_.text : read_file(encode_.input);
      ordered_json j;
      j["ids"] = tok.encode(text);
      out_ << j.dump() << "\n";
    });
    s->add_option("--tokenizer", encode_.tokenizer, "tokenizer JSON")->required();
    auto* text = s->add_option("--text", encode_.text, "text to encode");
    auto* input = s->add_option("--input", encode_.input, "file whose bytes are encoded");
    text->excludes(input);
    s->callback([text, input] {
      if (text->count() == 0 && input->count() == 0) {
        throw CLI::RequiredError("--text or --input");
      }
    });
  }

  void add_decode(CLI::App& app) {
    auto* s = sub(app, "decode", "decode token ids to text", [this] {
      const auto tok = Tokenizer::load(decode_.tokenizer);
      std::vector<TokenId> ids;
      for (const auto v : parse_sizes(decode_.ids, "id")) {
        if (v >= tok.vocab_size()) throw TokenIdRangeError(v, tok.vocab_size());
        ids.push_back(static_cast<TokenId>(v));
      }
      const auto bytes = tok.decode(ids);
      ordered_json j;
      if (utf8::is_valid(bytes)) {
        j["text"] = bytes;
      } else {
        static constexpr char kHex[] = "0123456789abcdef";
        std::string hex;
        for (const unsigned char c : bytes) {
          hex.push_back(kHex[c >> 4]);
          hex.push_back(kHex[c & 15]);
        }
        j["bytes_hex"] = hex;
      }
      out_ << j.dump() << "\n";
    });
    s->add_option("--tokenizer", decode_.tokenizer, "tokenizer JSON")->required();
    s->add_option("--ids", decode_.ids, "comma-separated token ids")->required();
  }

  void add_fertility(CLI::App& app) {
    auto* s = sub(app, "fertility", "tokens per document and per word on a corpus", [this] {
      const auto tok = Tokenizer::load(fert_.tokenizer);
      const auto corpus = load_corpus(fert_.corpus);
      // File names rather than paths keep reports independent of the working directory.
      const auto id = fert_.corpus_id.empty() ? std::filesystem::path(fert_.corpus).filename().string()
                                              : fert_.corpus_id;
      const auto tok_id = fert_.tokenizer_id.empty()
                              ? std::filesystem::path(fert_.tokenizer).filename().string()
                              : fert_.tokenizer_id;
      const auto report = fertility(tok, corpus, id, tok_id, threads_);
      emit(out_, fert_.out, report.to_json());
    });
    s->add_option("--tokenizer", fert_.tokenizer, "tokenizer JSON")->required();
    s->add_option("--corpus", fert_.corpus, "corpus file or directory")->required();
    s->add_option("--corpus-id", fert_.corpus_id, "corpus name recorded in the report");
    s->add_option("--tokenizer-id", fert_.tokenizer_id, "tokenizer name recorded in the report");
    s->add_option("--out", fert_.out, "report JSON to write (default stdout)");
  }

  void add_sweep(CLI::App& app) {
    auto* s = sub(app, "sweep", "fertility vs number of added tokens", [this] {
      const auto base = Tokenizer::load(sweep_.base);
      const auto domain = load_domain(sweep_.domain_tok, sweep_.domain_freqs);
      std::vector<NamedCorpus> corpora;
      for (const auto& spec : sweep_.corpora) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw ValidationError("--corpus expects NAME=PATH, got \"" + spec + "\"");
        }
        corpora.push_back({spec.substr(0, eq), load_corpus(spec.substr(eq + 1))});
      }
      std::vector<Strategy> strategies;
      for (const auto& name : split_list(sweep_.strategies)) strategies.push_back(parse_strategy(name));
      const auto result = tokex::sweep(base, domain.ranked, corpora,
                                       parse_sizes(sweep_.steps, "step"), strategies, threads_);
      emit(out_, sweep_.out, result.to_csv());
    });
    s->add_option("--base", sweep_.base, "base tokenizer JSON")->required();
    s->add_option("--domain-tok", sweep_.domain_tok, "in-domain tokenizer JSON")->required();
    s->add_option("--domain-freqs", sweep_.domain_freqs, "in-domain token frequencies")->required();
    s->add_option("--corpus", sweep_.corpora, "NAME=PATH (repeatable)")->required();
    s->add_option("--steps", sweep_.steps, "comma-separated token counts, ascending")->required();
    s->add_option("--strategies", sweep_.strategies, "comma-separated append,prepend")
        ->capture_default_str();
    s->add_option("--out", sweep_.out, "CSV to write (default stdout)");
  }

  void add_init_embeddings(CLI::App& app) {
    auto* s = sub(app, "init-embeddings", "mean-initialize rows for added tokens", [this] {
      const auto base = Tokenizer::load(emb_.base_tok);
      const auto ext = Tokenizer::load(emb_.ext_tok);
      if (emb_.base_proj.empty() != emb_.out_proj.empty()) {
        throw ValidationError("--base-proj and --out-proj must be given together");
      }
      const auto emb = init_new_embeddings(base, ext, load_embeddings(emb_.base_emb));
      save_embeddings(emb, emb_.out_emb);
      ordered_json j;
      j["rows"] = emb.rows();
      j["dims"] = emb.dims();
      j["new_rows"] = emb.rows() - base.vocab_size();
      if (!emb_.base_proj.empty()) {
        const auto proj = init_new_embeddings(base, ext, load_embeddings(emb_.base_proj));
        save_embeddings(proj, emb_.out_proj);
        j["projection_rows"] = proj.rows();
        j["projection_dims"] = proj.dims();
      }
      out_ << dump(j);
    });
    s->add_option("--base-tok", emb_.base_tok, "base tokenizer JSON")->required();
    s->add_option("--ext-tok", emb_.ext_tok, "extended tokenizer JSON")->required();
    s->add_option("--base-emb", emb_.base_emb, "base embedding matrix (EMB1)")->required();
    s->add_option("--base-proj", emb_.base_proj, "base projection matrix (EMB1)");
    s->add_option("--out-emb", emb_.out_emb, "extended embedding matrix to write")->required();
    s->add_option("--out-proj", emb_.out_proj, "extended projection matrix to write");
  }

  void add_costmodel(CLI::App& app) {
    auto* s = sub(app, "costmodel", "analytical throughput estimate", [this] {
      double tpw = cost_.tokens_per_word;
      if (!cost_.fertility.empty()) {
        const auto report = FertilityReport::from_json(read_file(cost_.fertility));
        if (report.total_words == 0) throw ValidationError("fertility report has no words");
        tpw = report.tokens_per_word_mean;
      }
      const ModelGeometry geom{cost_.hidden, cost_.layers, cost_.vocab, cost_.ffn_mult};
      const auto est = net_gain(geom, cost_.delta_vocab, cost_.token_reduction, cost_.words, tpw);
      emit(out_, cost_.out, est.to_json(geom, cost_.delta_vocab, cost_.words));
    });
    s->add_option("--hidden", cost_.hidden, "hidden size")->capture_default_str();
    s->add_option("--layers", cost_.layers, "number of layers")->capture_default_str();
    s->add_option("--vocab", cost_.vocab, "base vocabulary size")->capture_default_str();
    s->add_option("--ffn-mult", cost_.ffn_mult, "FFN width / hidden size")->capture_default_str();
    s->add_option("--delta-vocab", cost_.delta_vocab, "added tokens")->required();
    s->add_option("--words", cost_.words, "words per request")->required();
    s->add_option("--token-reduction", cost_.token_reduction, "fraction of tokens saved, [0,1)")
        ->required();
    s->add_option("--tokens-per-word", cost_.tokens_per_word, "base tokens per word")
        ->capture_default_str();
    s->add_option("--fertility", cost_.fertility, "base fertility report; overrides --tokens-per-word");
    s->add_option("--out", cost_.out, "JSON to write (default stdout)");
  }

  void add_adoption(CLI::App& app) {
    auto* s = sub(app, "adoption", "how often an oracle prefers the new tokenization", [this] {
      if (adopt_.oracle != "ngram") {
        throw ValidationError("unknown oracle \"" + adopt_.oracle + "\" (expected ngram)");
      }
      const auto ext = Tokenizer::load(adopt_.ext_tok);
      const auto base = Tokenizer::load(adopt_.base_tok);
      const auto oracle =
          NGramOracle::train(ext, load_corpus(adopt_.oracle_train), {adopt_.order, adopt_.alpha});
      const auto report = adoption_scan(oracle, ext, base, load_corpus(adopt_.corpus),
                                        parse_sizes(adopt_.buckets, "bucket"),
                                        adopt_.dump_decisions, threads_);
      emit(out_, adopt_.out, report.to_json());
    });
    s->add_option("--ext-tok", adopt_.ext_tok, "extended tokenizer JSON")->required();
    s->add_option("--base-tok", adopt_.base_tok, "base tokenizer JSON")->required();
    s->add_option("--oracle", adopt_.oracle, "probability oracle")->capture_default_str();
    s->add_option("--oracle-train", adopt_.oracle_train, "corpus for the n-gram oracle")->required();
    s->add_option("--corpus", adopt_.corpus, "corpus to scan")->required();
    s->add_option("--buckets", adopt_.buckets, "document word-count boundaries")->capture_default_str();
    s->add_option("--order", adopt_.order, "n-gram order")->capture_default_str();
    s->add_option("--alpha", adopt_.alpha, "additive smoothing")->capture_default_str();
    s->add_flag("--dump-decisions", adopt_.dump_decisions, "include per-word decisions");
    s->add_option("--out", adopt_.out, "JSON to write (default stdout)");
  }

  void add_verify(CLI::App& app) {
    auto* s = sub(app, "verify", "check that an extension never lengthens encodings", [this] {
      const auto base = Tokenizer::load(verify_.base);
      const auto ext = Tokenizer::load(verify_.ext);
      const auto samples = load_corpus(verify_.samples);
      const auto mono = verify_monotonic(base, ext, samples, threads_);
      const auto diff = structural_diff(base, ext);
      ordered_json j;
      j["samples"] = mono.samples;
      j["merge_prefix_preserved"] = diff.merge_prefix_preserved;
      j["ids_stable"] = diff.ids_stable;
      j["added_tokens"] = diff.added_tokens.size();
      auto& v = j["violations"] = ordered_json::array();
      for (const auto& m : mono.violations) {
        v.push_back({{"text", utf8::is_valid(m.text) ? m.text : render_token(m.text)},
                     {"base_len", m.base_len},
                     {"ext_len", m.ext_len}});
      }
      emit(out_, verify_.out, dump(j));
    });
    s->add_option("--base", verify_.base, "base tokenizer JSON")->required();
    s->add_option("--ext", verify_.ext, "extended tokenizer JSON")->required();
    s->add_option("--samples", verify_.samples, "sample corpus")->required();
    s->add_option("--out", verify_.out, "JSON to write (default stdout)");
  }

  std::ostream& out_;
  std::ostream& err_;
  unsigned threads_ = 0;
  std::vector<std::pair<CLI::App*, std::function<void()>>> handlers_;

  struct {
    std::string corpus, out, freqs;
    std::size_t vocab_size = 0;
    std::uint64_t min_pair_freq = 2;
  } train_;
  struct {
    std::string base, domain_tok, domain_freqs, out, report;
    std::string strategy = "append";
    std::size_t num_tokens = 0;
  } extend_;
  struct {
    std::string tokenizer, text, input;
  } encode_;
  struct {
    std::string tokenizer, ids;
  } decode_;
  struct {
    std::string tokenizer, corpus, corpus_id, tokenizer_id, out;
  } fert_;
  struct {
    std::string base, domain_tok, domain_freqs, steps, out;
    std::string strategies = "append,prepend";
    std::vector<std::string> corpora;
  } sweep_;
  struct {
    std::string base_tok, ext_tok, base_emb, base_proj, out_emb, out_proj;
  } emb_;
  struct {
    std::size_t hidden = 4096, layers = 32, vocab = 128256, delta_vocab = 0, words = 0;
    double ffn_mult = 3.5, token_reduction = 0.0, tokens_per_word = 1.3;
    std::string fertility, out;
  } cost_;
  struct {
    std::string ext_tok, base_tok, oracle_train, corpus, out;
    std::string oracle = "ngram";
    std::string buckets = "15,50";
    std::size_t order = 3;
    double alpha = 0.1;
    bool dump_decisions = false;
  } adopt_;
  struct {
    std::string base, ext, samples, out;
  } verify_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"tokex: train, extend and evaluate byte-level BPE tokenizers", "tokex"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Commands commands(app, out, err);

  std::vector<const char*> argv{"tokex"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kValidation;
  }

  try {
    commands.run(app);
    return kOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace tokex::cli
