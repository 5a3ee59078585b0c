#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tokex/tokenizer.hpp"

namespace tokex {

// Row-per-token matrix of 32-bit floats, row-major.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dims);
  EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<float> data);

  std::size_t rows() const { return rows_; }
  std::size_t dims() const { return dims_; }

  std::span<float> row(std::size_t r) { return {data_.data() + r * dims_, dims_}; }
  std::span<const float> row(std::size_t r) const { return {data_.data() + r * dims_, dims_}; }
  const std::vector<float>& data() const { return data_; }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dims_ = 0;
  std::vector<float> data_;
};

class EmbeddingFormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// "EMB1", u32 rows, u32 dims, rows*dims f32; all little-endian.
std::string serialize_embeddings(const EmbeddingMatrix& m);
// Throws EmbeddingFormatError on bad magic, a payload whose length disagrees
// with the header, or non-finite values.
EmbeddingMatrix deserialize_embeddings(std::string_view bytes);

EmbeddingMatrix load_embeddings(const std::filesystem::path& path);
void save_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path);

// Copies the base rows and gives every token of `ext` that is missing from
// `base` the mean of the rows of its base-tokenizer segmentation. Sums are
// accumulated left to right in double precision. Requires
// base_emb.rows() == base.vocab_size() and that `ext` keeps the base merge
// list as a prefix and the base ids unchanged; throws ValidationError
// otherwise.
EmbeddingMatrix init_new_embeddings(const Tokenizer& base, const Tokenizer& ext,
                                    const EmbeddingMatrix& base_emb);

}  // namespace tokex
