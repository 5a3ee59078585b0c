#pragma once

#include <cstddef>
#include <string>

namespace tokex {

struct ModelGeometry {
  std::size_t hidden_size = 4096;
  std::size_t num_layers = 32;
  std::size_t base_vocab = 128256;
  double ffn_mult = 3.5;  // FFN inner width / hidden size
};

// FLOPs for one token (2 FLOPs per multiply-accumulate):
//   attention_projections = L * 8 h^2              (Q, K, V, O)
//   ffn                   = L * 6 ffn_mult h^2     (gate, up, down)
//   attention_scores      = L * 2 h seq_len
//   logits                = 2 h vocab
// Latency is taken as proportional to FLOPs; memory bandwidth is not modelled.
struct ForwardCost {
  double attention_projections = 0;
  double ffn = 0;
  double attention_scores = 0;
  double logits = 0;

  double total() const { return attention_projections + ffn + attention_scores + logits; }
};

ForwardCost forward_cost(const ModelGeometry& geom, std::size_t vocab, double seq_len);
double forward_cost_per_token(const ModelGeometry& geom, std::size_t vocab, double seq_len);

struct ThroughputEstimate {
  // Extended-vocab cost over base cost at the base sequence length.
  double per_token_cost_ratio = 1.0;
  // Extended cost at the shortened sequence over base cost at the base length.
  double effective_cost_ratio = 1.0;
  double token_ratio = 1.0;  // 1 - token_reduction
  // 1 / (token_ratio * effective_cost_ratio) - 1
  double net_rps_gain = 0.0;

  double tokens_per_word = 0.0;
  double base_seq_len = 0.0;
  double ext_seq_len = 0.0;
  ForwardCost base_cost;
  ForwardCost ext_cost;

  std::string to_json(const ModelGeometry& geom, std::size_t delta_vocab, std::size_t words) const;
};

// Requests are `words` long; the base sequence is words * tokens_per_word
// tokens and the extended one is (1 - token_reduction) times that. Throws
// ValidationError for token_reduction outside [0, 1) or non-positive inputs.
ThroughputEstimate net_gain(const ModelGeometry& geom, std::size_t delta_vocab,
                            double token_reduction, std::size_t words,
                            double tokens_per_word = 1.3);

}  // namespace tokex
