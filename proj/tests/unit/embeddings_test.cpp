#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "reference.hpp"
#include "tokex/embeddings.hpp"
#include "tokex/errors.hpp"
#include "tokex/extender.hpp"
#include "tokex/trainer.hpp"

namespace tokex {
namespace {

EmbeddingMatrix random_matrix(std::size_t rows, std::size_t dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> d(-1.0f, 1.0f);
  std::vector<float> data(rows * dims);
  for (auto& x : data) x = d(rng);
  return EmbeddingMatrix(rows, dims, std::move(data));
}

TEST(Embeddings, NewRowIsMeanOfBaseSegmentation) {
  const auto base = Tokenizer::from_merges({{"t", "h"}, {"th", "e"}});
  const auto ext = extend(base, {"ther"}, {1, Strategy::kAppend}).tokenizer;
  EmbeddingMatrix emb(base.vocab_size(), 2);
  emb.row(257)[0] = 1.0f;  // "the"
  emb.row(257)[1] = 2.0f;
  emb.row('r')[0] = 3.0f;
  emb.row('r')[1] = 6.0f;
  const auto out = init_new_embeddings(base, ext, emb);
  ASSERT_EQ(out.rows(), 259u);
  EXPECT_EQ(out.row(258)[0], 2.0f);
  EXPECT_EQ(out.row(258)[1], 4.0f);
}

TEST(Embeddings, ThreePieceMean) {
  // Base knows no merges; "ab" is added, then "abc" encodes to ab + c under
  // the extended tokenizer but to a + b + c under the base.
  const auto base = Tokenizer::byte_level();
  const auto ext = extend(base, {"ab", "abc"}, {2, Strategy::kAppend}).tokenizer;
  ASSERT_EQ(ext.vocab_size(), 258u);
  EmbeddingMatrix emb(256, 1);
  emb.row('a')[0] = 1.0f;
  emb.row('b')[0] = 2.0f;
  emb.row('c')[0] = 6.0f;
  const auto out = init_new_embeddings(base, ext, emb);
  EXPECT_EQ(out.row(256)[0], 1.5f);
  EXPECT_EQ(out.row(257)[0], 3.0f);
}

TEST(Embeddings, BaseRowsUntouchedAndNewRowsWithinBounds) {
  std::mt19937_64 rng(9);
  std::vector<std::string> docs;
  for (int i = 0; i < 60; ++i) docs.push_back(testing::random_unicode(rng, 40, {"cable", "usb"}));
  const auto base = train(Corpus{docs}, {330, 2}).tokenizer;
  const auto dom = train(Corpus{docs}, {600, 2}).tokenizer;
  const auto vocab = rank_by_frequency(dom, token_frequencies(dom, Corpus{docs}));
  const auto ext = extend(base, vocab, {100, Strategy::kAppend}).tokenizer;
  ASSERT_GT(ext.vocab_size(), base.vocab_size());

  const auto emb = random_matrix(base.vocab_size(), 8, 1);
  const auto out = init_new_embeddings(base, ext, emb);
  ASSERT_EQ(out.rows(), ext.vocab_size());
  EXPECT_EQ(std::memcmp(out.data().data(), emb.data().data(), emb.data().size() * sizeof(float)), 0);

  for (TokenId id = static_cast<TokenId>(base.vocab_size()); id < ext.vocab_size(); ++id) {
    const auto pieces = testing::naive_encode(base, ext.token(id));
    ASSERT_GE(pieces.size(), 2u);
    for (std::size_t d = 0; d < 8; ++d) {
      float lo = std::numeric_limits<float>::max(), hi = -lo;
      long double sum = 0;
      for (auto p : pieces) {
        lo = std::min(lo, emb.row(p)[d]);
        hi = std::max(hi, emb.row(p)[d]);
        sum += emb.row(p)[d];
      }
      EXPECT_GE(out.row(id)[d], lo);
      EXPECT_LE(out.row(id)[d], hi);
      EXPECT_NEAR(out.row(id)[d], static_cast<double>(sum / pieces.size()), 1e-6);
    }
  }
}

TEST(Embeddings, RejectsMismatchedInputs) {
  const auto base = Tokenizer::from_merges({{"a", "b"}, {"c", "d"}, {"ab", "cd"}});
  const auto ext = extend(base, {"bc"}, {1, Strategy::kAppend}).tokenizer;
  EXPECT_THROW(init_new_embeddings(base, ext, EmbeddingMatrix(256, 4)), ValidationError);
  const auto pre = extend(base, {"bc"}, {1, Strategy::kPrependBaseline}).tokenizer;
  EXPECT_THROW(init_new_embeddings(base, pre, EmbeddingMatrix(base.vocab_size(), 4)),
               ValidationError);
}

TEST(EmbeddingFile, LayoutIsLittleEndianHeaderThenFloats) {
  EmbeddingMatrix m(256, 2);
  m.row(0)[0] = 1.0f;
  const auto bytes = serialize_embeddings(m);
  ASSERT_EQ(bytes.size(), 12u + 256u * 2u * 4u);
  EXPECT_EQ(bytes.substr(0, 4), "EMB1");
  EXPECT_EQ(bytes.substr(4, 4), std::string("\x00\x01\x00\x00", 4));
  EXPECT_EQ(bytes.substr(8, 4), std::string("\x02\x00\x00\x00", 4));
  EXPECT_EQ(bytes.substr(12, 4), std::string("\x00\x00\x80\x3f", 4));  // 1.0f
}

TEST(EmbeddingFile, RoundTrip) {
  const auto m = random_matrix(300, 5, 3);
  EXPECT_EQ(deserialize_embeddings(serialize_embeddings(m)), m);
}

TEST(EmbeddingFile, RejectsBadMagic) {
  auto bytes = serialize_embeddings(EmbeddingMatrix(256, 1));
  bytes[3] = '2';
  EXPECT_THROW(deserialize_embeddings(bytes), EmbeddingFormatError);
}

TEST(EmbeddingFile, RejectsLengthMismatch) {
  const auto bytes = serialize_embeddings(EmbeddingMatrix(256, 1));
  EXPECT_THROW(deserialize_embeddings(bytes.substr(0, bytes.size() - 1)), EmbeddingFormatError);
  EXPECT_THROW(deserialize_embeddings(bytes + "x"), EmbeddingFormatError);
  EXPECT_THROW(deserialize_embeddings(bytes.substr(0, 7)), EmbeddingFormatError);
}

TEST(EmbeddingFile, RejectsTooFewRowsOrDims) {
  EXPECT_THROW(deserialize_embeddings(serialize_embeddings(EmbeddingMatrix(255, 1))),
               EmbeddingFormatError);
  EXPECT_THROW(deserialize_embeddings(serialize_embeddings(EmbeddingMatrix(256, 0))),
               EmbeddingFormatError);
}

TEST(EmbeddingFile, RejectsNonFiniteValues) {
  EmbeddingMatrix m(256, 1);
  m.row(100)[0] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(deserialize_embeddings(serialize_embeddings(m)), EmbeddingFormatError);
  m.row(100)[0] = std::numeric_limits<float>::infinity();
  EXPECT_THROW(deserialize_embeddings(serialize_embeddings(m)), EmbeddingFormatError);
}

}  // namespace
}  // namespace tokex
