#include "tokex/embeddings.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "tokex/extender.hpp"
#include "tokex/io.hpp"

namespace tokex {

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dims)
    : rows_(rows), dims_(dims), data_(rows * dims, 0.0f) {}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<float> data)
    : rows_(rows), dims_(dims), data_(std::move(data)) {
  if (data_.size() != rows * dims) {
    throw ValidationError("embedding data has " + std::to_string(data_.size()) +
                          " values, expected " + std::to_string(rows * dims));
  }
}

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::size_t kHeaderSize = 12;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace

std::string serialize_embeddings(const EmbeddingMatrix& m) {
  if (m.rows() > UINT32_MAX || m.dims() > UINT32_MAX) {
    throw ValidationError("embedding matrix too large for the EMB1 format");
  }
  std::string out(kMagic, sizeof kMagic);
  out.reserve(kHeaderSize + m.data().size() * 4);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.dims()));
  for (const float f : m.data()) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

EmbeddingMatrix deserialize_embeddings(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw EmbeddingFormatError("bad magic: expected \"EMB1\"");
  }
  if (bytes.size() < kHeaderSize) throw EmbeddingFormatError("truncated header");
  const std::uint64_t rows = get_u32(bytes, 4);
  const std::uint64_t dims = get_u32(bytes, 8);
  if (rows < 256 || dims < 1) {
    throw EmbeddingFormatError("matrix must have at least 256 rows and 1 column, header says " +
                               std::to_string(rows) + "x" + std::to_string(dims));
  }
  const std::uint64_t expected = kHeaderSize + rows * dims * 4;
  if (bytes.size() != expected) {
    throw EmbeddingFormatError("truncated payload: header says " + std::to_string(rows) + "x" +
                               std::to_string(dims) + " (" + std::to_string(expected) +
                               " bytes), file has " + std::to_string(bytes.size()));
  }
  std::vector<float> data(rows * dims);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_u32(bytes, kHeaderSize + 4 * i));
    if (!std::isfinite(data[i])) {
      throw EmbeddingFormatError("non-finite value at row " + std::to_string(i / dims) +
                                 ", column " + std::to_string(i % dims));
    }
  }
  return EmbeddingMatrix(rows, dims, std::move(data));
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  return deserialize_embeddings(read_file(path));
}

void save_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  write_file(path, serialize_embeddings(m));
}

EmbeddingMatrix init_new_embeddings(const Tokenizer& base, const Tokenizer& ext,
                                    const EmbeddingMatrix& base_emb) {
  if (base_emb.rows() != base.vocab_size()) {
    throw ValidationError("embedding rows (" + std::to_string(base_emb.rows()) +
                          ") do not match base vocab size (" +
                          std::to_string(base.vocab_size()) + ")");
  }
  const auto diff = structural_diff(base, ext);
  if (!diff.merge_prefix_preserved || !diff.ids_stable) {
    throw ValidationError("extended tokenizer is not an append extension of the base tokenizer");
  }

  const std::size_t dims = base_emb.dims();
  EmbeddingMatrix out(ext.vocab_size(), dims);
  std::copy(base_emb.data().begin(), base_emb.data().end(), out.row(0).data());

  std::vector<double> acc(dims);
  std::vector<TokenId> parts;
  for (TokenId id = static_cast<TokenId>(base.vocab_size()); id < ext.vocab_size(); ++id) {
    parts.clear();
    base.encode_into(ext.token(id), parts);
    if (parts.empty()) throw std::logic_error("token encodes to nothing under the base tokenizer");
    std::fill(acc.begin(), acc.end(), 0.0);
    for (const TokenId p : parts) {
      const auto src = base_emb.row(p);
      for (std::size_t k = 0; k < dims; ++k) acc[k] += src[k];
    }
    auto dst = out.row(id);
    for (std::size_t k = 0; k < dims; ++k) dst[k] = static_cast<float>(acc[k] / parts.size());
  }
  return out;
}

}  // namespace tokex
