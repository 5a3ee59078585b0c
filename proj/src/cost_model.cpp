#include "tokex/cost_model.hpp"

#include <nlohmann/json.hpp>

#include "tokex/errors.hpp"

namespace tokex {
namespace {

void check_geometry(const ModelGeometry& g) {
  if (g.hidden_size == 0 || g.num_layers == 0 || g.base_vocab == 0 || !(g.ffn_mult > 0)) {
    throw ValidationError("model geometry values must be positive");
  }
}

nlohmann::ordered_json cost_json(const ForwardCost& c) {
  return {{"attention_projections", c.attention_projections},
          {"ffn", c.ffn},
          {"attention_scores", c.attention_scores},
          {"logits", c.logits},
          {"total", c.total()}};
}

}  // namespace

ForwardCost forward_cost(const ModelGeometry& geom, std::size_t vocab, double seq_len) {
  check_geometry(geom);
  const double h = static_cast<double>(geom.hidden_size);
  const double layers = static_cast<double>(geom.num_layers);
  ForwardCost c;
  c.attention_projections = layers * 8.0 * h * h;
  c.ffn = layers * 6.0 * geom.ffn_mult * h * h;
  c.attention_scores = layers * 2.0 * h * seq_len;
  c.logits = 2.0 * h * static_cast<double>(vocab);
  return c;
}

double forward_cost_per_token(const ModelGeometry& geom, std::size_t vocab, double seq_len) {
  return forward_cost(geom, vocab, seq_len).total();
}

ThroughputEstimate net_gain(const ModelGeometry& geom, std::size_t delta_vocab,
                            double token_reduction, std::size_t words, double tokens_per_word) {
  check_geometry(geom);
  if (!(token_reduction >= 0.0 && token_reduction < 1.0)) {
    throw ValidationError("token reduction must lie in [0, 1)");
  }
  if (!(tokens_per_word > 0.0)) throw ValidationError("tokens per word must be positive");
  if (words == 0) throw ValidationError("words per request must be positive");

  ThroughputEstimate e;
  e.tokens_per_word = tokens_per_word;
  e.token_ratio = 1.0 - token_reduction;
  e.base_seq_len = static_cast<double>(words) * tokens_per_word;
  e.ext_seq_len = e.base_seq_len * e.token_ratio;
  e.base_cost = forward_cost(geom, geom.base_vocab, e.base_seq_len);
  e.ext_cost = forward_cost(geom, geom.base_vocab + delta_vocab, e.ext_seq_len);

  const double base_total = e.base_cost.total();
  e.per_token_cost_ratio =
      forward_cost_per_token(geom, geom.base_vocab + delta_vocab, e.base_seq_len) / base_total;
  e.effective_cost_ratio = e.ext_cost.total() / base_total;
  e.net_rps_gain = 1.0 / (e.token_ratio * e.effective_cost_ratio) - 1.0;
  return e;
}

std::string ThroughputEstimate::to_json(const ModelGeometry& geom, std::size_t delta_vocab,
                                        std::size_t words) const {
  nlohmann::ordered_json j;
  j["per_token_cost_ratio"] = per_token_cost_ratio;
  j["effective_cost_ratio"] = effective_cost_ratio;
  j["token_ratio"] = token_ratio;
  j["net_rps_gain"] = net_rps_gain;
  j["inputs"] = {{"hidden_size", geom.hidden_size},
                 {"num_layers", geom.num_layers},
                 {"base_vocab", geom.base_vocab},
                 {"ffn_mult", geom.ffn_mult},
                 {"delta_vocab", delta_vocab},
                 {"words", words},
                 {"tokens_per_word", tokens_per_word}};
  j["base_seq_len"] = base_seq_len;
  j["ext_seq_len"] = ext_seq_len;
  j["base_cost_flops"] = cost_json(base_cost);
  j["ext_cost_flops"] = cost_json(ext_cost);
  j["model"] = {
      {"flops_per_token",
       "L*8h^2 (attention projections) + L*6*ffn_mult*h^2 (gated FFN) + L*2h*seq_len "
       "(attention scores) + 2h*vocab (logits)"},
      {"gain", "1 / (token_ratio * effective_cost_ratio) - 1"},
      {"assumption", "latency proportional to FLOPs; no memory-bandwidth, batching or KV-cache model"}};
  return j.dump(2) + "\n";
}

}  // namespace tokex
