#include <gtest/gtest.h>

#include <filesystem>
#include <nlohmann/json.hpp>
#include <random>

#include "reference.hpp"
#include "tokex/byte_map.hpp"
#include "tokex/io.hpp"
#include "tokex/pretokenizer.hpp"
#include "tokex/tokenizer.hpp"
#include "tokex/utf8.hpp"

namespace tokex {
namespace {

Tokenizer the_tokenizer() {
  return Tokenizer::from_merges({{"t", "h"}, {"th", "e"}, {" ", "the"}, {"e", "r"}});
}

TEST(Tokenizer, ByteLevelHasIdentityIds) {
  const auto tok = Tokenizer::byte_level();
  EXPECT_EQ(tok.vocab_size(), 256u);
  EXPECT_EQ(tok.encode("Hi"), (std::vector<TokenId>{'H', 'i'}));
  EXPECT_EQ(tok.encode("\xFF"), (std::vector<TokenId>{255}));
}

TEST(Tokenizer, FromMergesAssignsConsecutiveIds) {
  const auto tok = the_tokenizer();
  EXPECT_EQ(tok.vocab_size(), 260u);
  EXPECT_EQ(tok.find("th"), 256u);
  EXPECT_EQ(tok.find("the"), 257u);
  EXPECT_EQ(tok.find(" the"), 258u);
  EXPECT_EQ(tok.find("er"), 259u);
  EXPECT_FALSE(tok.contains("ther"));
}

TEST(Tokenizer, EncodesExamples) {
  const auto tok = the_tokenizer();
  EXPECT_EQ(tok.encode("the the"), (std::vector<TokenId>{257, 258}));
  EXPECT_EQ(tok.encode("ther"), (std::vector<TokenId>{257, 'r'}));  // "th" and "the" outrank "er"
  EXPECT_EQ(tok.encode("her"), (std::vector<TokenId>{'h', 259}));
  EXPECT_TRUE(tok.encode("").empty());
}

TEST(Tokenizer, LowestRankWinsOverPosition) {
  // "bc" outranks "ab", so "abc" -> a + bc even though "ab" is leftmost.
  const auto tok = Tokenizer::from_merges({{"b", "c"}, {"a", "b"}});
  EXPECT_EQ(tok.encode("abc"), (std::vector<TokenId>{'a', 256}));
}

TEST(Tokenizer, LeftmostWinsOnEqualRank) {
  const auto tok = Tokenizer::from_merges({{"a", "a"}});
  EXPECT_EQ(tok.encode("aaa"), (std::vector<TokenId>{256, 'a'}));
}

TEST(Tokenizer, MergesNeverCrossChunks) {
  const auto tok = Tokenizer::from_merges({{"a", " "}, {"a", "b"}});
  EXPECT_EQ(tok.encode("a b"), (std::vector<TokenId>{'a', ' ', 'b'}));
}

TEST(Tokenizer, DecodeConcatenatesBytes) {
  const auto tok = the_tokenizer();
  const std::vector<TokenId> ids{257, 258, 259};
  EXPECT_EQ(tok.decode(ids), "the theer");
  const std::vector<TokenId> partial{0xC3};
  EXPECT_FALSE(utf8::is_valid(tok.decode(partial)));
}

TEST(Tokenizer, DecodeRejectsOutOfRangeIds) {
  const auto tok = the_tokenizer();
  const std::vector<TokenId> ids{1, 260};
  try {
    tok.decode(ids);
    FAIL() << "expected TokenIdRangeError";
  } catch (const TokenIdRangeError& e) {
    EXPECT_EQ(e.id(), 260u);
  }
}

TEST(Tokenizer, RoundTripAndNaiveAgreementOnRandomText) {
  const auto tok = Tokenizer::from_merges(testing::brute_force_train(
      {"the cat sat on the mat with the hat", "another thing, then the other: the end",
       "h\xC3\xA9llo w\xC3\xB6rld \xE4\xB8\xAD\xE6\x96\x87 \xE4\xB8\xAD\xE6\x96\x87"},
      300, 2));
  ASSERT_GT(tok.merges().size(), 10u);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 3000; ++i) {
    const auto text = testing::random_unicode(rng, 40);
    const auto ids = tok.encode(text);
    EXPECT_EQ(tok.decode(ids), text);
    EXPECT_EQ(ids, testing::naive_encode(tok, text)) << text;
  }
}

TEST(Tokenizer, EncodingIsChunkLocal) {
  const auto tok = the_tokenizer();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto text = testing::random_unicode(rng, 30, {"the", " the", "ther"});
    std::vector<TokenId> by_chunk;
    for (auto c : pre_tokenize(text)) {
      const auto part = tok.encode(c);
      by_chunk.insert(by_chunk.end(), part.begin(), part.end());
    }
    EXPECT_EQ(tok.encode(text), by_chunk);
  }
}

class TokenizerFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    path_ = std::filesystem::temp_directory_path() /
            (std::string("tokex_tok_") +
             ::testing::UnitTest::GetInstance()->current_test_info()->name() + ".json");
  }
  void TearDown() override { std::filesystem::remove(path_); }
  std::filesystem::path path_;
};

TEST_F(TokenizerFiles, SaveLoadSaveIsByteIdentical) {
  const auto tok = the_tokenizer();
  tok.save(path_);
  const auto first = read_file(path_);
  const auto loaded = Tokenizer::load(path_);
  EXPECT_EQ(loaded, tok);
  loaded.save(path_);
  EXPECT_EQ(read_file(path_), first);
}

TEST(TokenizerJson, RendersVocabInIdOrderAndMergesAsPairs) {
  const auto j = nlohmann::ordered_json::parse(the_tokenizer().to_json());
  EXPECT_EQ(j["version"], 1);
  EXPECT_EQ(j["pre_tokenizer"], "ws-byte-v1");
  EXPECT_EQ(j["vocab"]["\xC4\xA0the"], 258);  // " the"
  EXPECT_EQ(j["merges"][2], "\xC4\xA0 the");
  EXPECT_EQ(j["vocab"].begin().key(), render_token(std::string(1, '\0')));
}

// Builds a tokenizer document by hand so that each test can break one thing.
nlohmann::json valid_doc() {
  return nlohmann::json::parse(Tokenizer::from_merges({{"a", "b"}, {"ab", "c"}}).to_json());
}

TokenizerErrorKind kind_of(const nlohmann::json& doc, std::string* location = nullptr) {
  try {
    Tokenizer::from_json(doc.dump());
  } catch (const TokenizerError& e) {
    if (location) *location = e.location();
    return e.kind();
  }
  ADD_FAILURE() << "document was accepted";
  return TokenizerErrorKind::kMalformedJson;
}

TEST(TokenizerJson, AcceptsValidDocument) {
  EXPECT_EQ(Tokenizer::from_json(valid_doc().dump()).vocab_size(), 258u);
}

TEST(TokenizerJson, MalformedJson) {
  try {
    Tokenizer::from_json("{\"version\": 1,");
    FAIL();
  } catch (const TokenizerError& e) {
    EXPECT_EQ(e.kind(), TokenizerErrorKind::kMalformedJson);
  }
  auto doc = valid_doc();
  doc.erase("merges");
  EXPECT_EQ(kind_of(doc), TokenizerErrorKind::kMalformedJson);
}

TEST(TokenizerJson, UnsupportedFormat) {
  auto doc = valid_doc();
  doc["version"] = 2;
  EXPECT_EQ(kind_of(doc), TokenizerErrorKind::kUnsupportedFormat);
  doc = valid_doc();
  doc["pre_tokenizer"] = "gpt2-regex";
  EXPECT_EQ(kind_of(doc), TokenizerErrorKind::kUnsupportedFormat);
}

TEST(TokenizerJson, InvalidTokenString) {
  auto doc = valid_doc();
  doc["vocab"]["has space"] = 258;
  std::string loc;
  EXPECT_EQ(kind_of(doc, &loc), TokenizerErrorKind::kInvalidTokenString);
  EXPECT_EQ(loc, "vocab[\"has space\"]");
}

TEST(TokenizerJson, InvalidVocabIds) {
  auto doc = valid_doc();
  doc["vocab"]["zz"] = 300;  // gap
  EXPECT_EQ(kind_of(doc), TokenizerErrorKind::kInvalidVocabIds);
  doc = valid_doc();
  doc["vocab"]["zz"] = 257;  // reused
  EXPECT_EQ(kind_of(doc), TokenizerErrorKind::kInvalidVocabIds);
  doc = valid_doc();
  doc["vocab"]["zz"] = -1;
  EXPECT_EQ(kind_of(doc), TokenizerErrorKind::kInvalidVocabIds);
}

TEST(TokenizerJson, MissingByteToken) {
  auto doc = valid_doc();
  // Replace byte 'q' with a multi-byte token so ids stay dense.
  doc["vocab"].erase("q");
  doc["vocab"]["qq"] = static_cast<int>('q');
  EXPECT_EQ(kind_of(doc), TokenizerErrorKind::kMissingByteToken);
}

TEST(TokenizerJson, MalformedMerge) {
  auto doc = valid_doc();
  doc["merges"][0] = "ab";
  std::string loc;
  EXPECT_EQ(kind_of(doc, &loc), TokenizerErrorKind::kMalformedMerge);
  EXPECT_EQ(loc, "merges[0]");
  doc["merges"][0] = "a  b";
  EXPECT_EQ(kind_of(doc), TokenizerErrorKind::kMalformedMerge);
}

TEST(TokenizerJson, MergeReferencesAbsentToken) {
  auto doc = valid_doc();
  doc["merges"].push_back("c d");
  std::string loc;
  EXPECT_EQ(kind_of(doc, &loc), TokenizerErrorKind::kMergeReferencesAbsentToken);
  EXPECT_EQ(loc, "merges[2]");
}

TEST(TokenizerJson, MergeIdOrder) {
  std::vector<std::string> tokens = Tokenizer::byte_level().tokens();
  tokens.push_back("abc");
  tokens.push_back("ab");
  try {
    Tokenizer(tokens, {{"a", "b"}, {"ab", "c"}});
    FAIL();
  } catch (const TokenizerError& e) {
    EXPECT_EQ(e.kind(), TokenizerErrorKind::kMergeIdOrder);
    EXPECT_EQ(e.location(), "merges[1]");
  }
}

TEST(TokenizerJson, DuplicateMerge) {
  auto doc = valid_doc();
  doc["merges"].push_back("a b");
  EXPECT_EQ(kind_of(doc), TokenizerErrorKind::kDuplicateMerge);
}

TEST(Tokenizer, ConstructorRejectsEmptyAndRepeatedTokens) {
  auto tokens = Tokenizer::byte_level().tokens();
  tokens.push_back("");
  EXPECT_THROW(Tokenizer(tokens, {}), TokenizerError);
  tokens.back() = "a";
  EXPECT_THROW(Tokenizer(tokens, {}), TokenizerError);
}

}  // namespace
}  // namespace tokex
