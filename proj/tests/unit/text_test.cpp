#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

#include "reference.hpp"
#include "tokex/byte_map.hpp"
#include "tokex/corpus.hpp"
#include "tokex/errors.hpp"
#include "tokex/io.hpp"
#include "tokex/pretokenizer.hpp"
#include "tokex/utf8.hpp"

namespace tokex {
namespace {

// The usual construction: printable ranges map to themselves, the rest are
// appended after 255 in byte order.
std::vector<char32_t> reference_byte_table() {
  std::vector<int> bs;
  for (int b = '!'; b <= '~'; ++b) bs.push_back(b);
  for (int b = 0xA1; b <= 0xAC; ++b) bs.push_back(b);
  for (int b = 0xAE; b <= 0xFF; ++b) bs.push_back(b);
  std::vector<char32_t> cs(bs.begin(), bs.end());
  int n = 0;
  for (int b = 0; b < 256; ++b) {
    if (std::find(bs.begin(), bs.end(), b) == bs.end()) {
      bs.push_back(b);
      cs.push_back(static_cast<char32_t>(256 + n++));
    }
  }
  std::vector<char32_t> table(256);
  for (std::size_t i = 0; i < bs.size(); ++i) table[static_cast<std::size_t>(bs[i])] = cs[i];
  return table;
}

TEST(ByteMap, MatchesReferenceTable) {
  const auto table = reference_byte_table();
  for (int b = 0; b < 256; ++b) {
    EXPECT_EQ(byte_to_codepoint(static_cast<unsigned char>(b)), table[static_cast<std::size_t>(b)]) << b;
    EXPECT_EQ(codepoint_to_byte(table[static_cast<std::size_t>(b)]), static_cast<unsigned char>(b));
  }
}

TEST(ByteMap, IsABijection) {
  std::set<char32_t> seen;
  for (int b = 0; b < 256; ++b) seen.insert(byte_to_codepoint(static_cast<unsigned char>(b)));
  EXPECT_EQ(seen.size(), 256u);
  EXPECT_FALSE(codepoint_to_byte(U' ').has_value());
  EXPECT_FALSE(codepoint_to_byte(0x144).has_value());
}

TEST(ByteMap, RendersSpaceAndNewline) {
  EXPECT_EQ(render_token(" the"), "\xC4\xA0the");  // Ġthe
  EXPECT_EQ(render_token("\n"), "\xC4\x8A");        // Ċ
  EXPECT_EQ(render_token("abc"), "abc");
}

TEST(ByteMap, ParseInvertsRenderForAllBytes) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s(1 + rng() % 12, '\0');
    for (auto& c : s) c = static_cast<char>(rng() % 256);
    const auto rendered = render_token(s);
    EXPECT_TRUE(utf8::is_valid(rendered));
    EXPECT_EQ(parse_token(rendered), s);
  }
  EXPECT_FALSE(parse_token("a b").has_value());
  EXPECT_FALSE(parse_token("\xFF").has_value());
}

TEST(Utf8, Validity) {
  EXPECT_TRUE(utf8::is_valid(""));
  EXPECT_TRUE(utf8::is_valid("h\xC3\xA9llo \xF0\x9F\x98\x80"));
  EXPECT_FALSE(utf8::is_valid("\xC3"));
  EXPECT_FALSE(utf8::is_valid("\xC0\xAF"));      // overlong '/'
  EXPECT_FALSE(utf8::is_valid("\xED\xA0\x80"));  // surrogate
  EXPECT_FALSE(utf8::is_valid("\xF4\x90\x80\x80"));
}

TEST(Utf8, AppendRoundTrips) {
  for (char32_t cp : {U'a', U'é', U'€', U'\U0001F600', U'　'}) {
    std::string s;
    utf8::append(s, cp);
    std::size_t pos = 0;
    EXPECT_EQ(utf8::next(s, pos), cp);
    EXPECT_EQ(pos, s.size());
  }
}

TEST(Utf8, CountsWordsOnUnicodeWhitespace) {
  EXPECT_EQ(utf8::count_words(""), 0u);
  EXPECT_EQ(utf8::count_words("   "), 0u);
  EXPECT_EQ(utf8::count_words("one two  three"), 3u);
  EXPECT_EQ(utf8::count_words("a\xE3\x80\x80" "b"), 2u);  // ideographic space
  EXPECT_EQ(utf8::count_words("a\xC2\xA0" "b"), 2u);      // no-break space
  EXPECT_EQ(utf8::count_words("\tx\n"), 1u);
}

std::vector<std::string> chunks(std::string_view text) {
  std::vector<std::string> out;
  for (auto c : pre_tokenize(text)) out.emplace_back(c);
  return out;
}

TEST(PreTokenizer, SpaceAttachesToFollowingWord) {
  EXPECT_EQ(chunks("hello world"), (std::vector<std::string>{"hello", " world"}));
  EXPECT_EQ(chunks("hi\n x"), (std::vector<std::string>{"hi", "\n", " x"}));
  EXPECT_EQ(chunks("a  b"), (std::vector<std::string>{"a", " ", " b"}));
  EXPECT_EQ(chunks("a\tb"), (std::vector<std::string>{"a", "\t", "b"}));
  EXPECT_EQ(chunks("end "), (std::vector<std::string>{"end", " "}));
  EXPECT_TRUE(chunks("").empty());
}

TEST(PreTokenizer, NonAsciiWhitespaceStaysInsideWords) {
  EXPECT_EQ(chunks("a\xC2\xA0" "b"), (std::vector<std::string>{"a\xC2\xA0" "b"}));
}

TEST(PreTokenizer, AgreesWithNaiveRestatement) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5000; ++i) {
    const auto text = testing::random_unicode(rng, 30);
    const auto got = chunks(text);
    EXPECT_EQ(got, testing::naive_pre_tokenize(text)) << text;
    std::string joined;
    for (const auto& c : got) joined += c;
    EXPECT_EQ(joined, text);
  }
}

TEST(PreTokenizer, CallbackFormMatchesList) {
  const std::string text = "  two words\n\n and more ";
  std::vector<std::string> via_callback;
  for_each_chunk(text, [&](std::string_view c) { via_callback.emplace_back(c); });
  EXPECT_EQ(via_callback, chunks(text));
}

class CorpusFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("tokex_corpus_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(CorpusFiles, FileIsOneDocumentPerLine) {
  write_file(dir_ / "c.txt", "first line\r\nsecond\n\nfourth\n");
  const auto c = load_corpus(dir_ / "c.txt");
  EXPECT_EQ(c.documents, (std::vector<std::string>{"first line", "second", "", "fourth"}));
  EXPECT_EQ(c.total_bytes(), 10u + 6u + 0u + 6u);
}

TEST_F(CorpusFiles, DirectoryIsOneDocumentPerTxtFile) {
  write_file(dir_ / "b.txt", "beta\ntwo lines");
  write_file(dir_ / "a.txt", "alpha");
  write_file(dir_ / "skip.md", "ignored");
  const auto c = load_corpus(dir_);
  EXPECT_EQ(c.documents, (std::vector<std::string>{"alpha", "beta\ntwo lines"}));
}

TEST_F(CorpusFiles, MissingPathIsAnIoError) {
  EXPECT_THROW(load_corpus(dir_ / "nope.txt"), IoError);
  EXPECT_THROW(read_file(dir_ / "nope.txt"), IoError);
}

}  // namespace
}  // namespace tokex
