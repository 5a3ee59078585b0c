#pragma once

#include <compare>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tokex/detail/merge_table.hpp"
#include "tokex/errors.hpp"

namespace tokex {

// A merge of two adjacent tokens; the produced token is left + right.
struct MergeRule {
  std::string left;
  std::string right;

  std::string output() const { return left + right; }

  friend bool operator==(const MergeRule&, const MergeRule&) = default;
  friend auto operator<=>(const MergeRule&, const MergeRule&) = default;
};

class TokenIdRangeError : public ValidationError {
 public:
  TokenIdRangeError(std::uint64_t id, std::size_t vocab_size);
  std::uint64_t id() const { return id_; }

 private:
  std::uint64_t id_;
};

// Byte-level BPE tokenizer: a dense vocabulary (index = id), an ordered merge
// list and the fixed "ws-byte-v1" pre-tokenizer. Immutable once constructed;
// encode/decode may be called concurrently.
class Tokenizer {
 public:
  // Validates and throws TokenizerError on the first violated invariant:
  // every token non-empty and unique, all 256 single-byte tokens present,
  // every merge's left/right/output present with id(output) above both
  // inputs, and no duplicate merges.
  Tokenizer(std::vector<std::string> tokens, std::vector<MergeRule> merges);

  // 256 byte tokens, id == byte value, no merges.
  static Tokenizer byte_level();
  // Byte tokens followed by each merge output in list order (outputs already
  // present keep their id).
  static Tokenizer from_merges(std::vector<MergeRule> merges);

  static Tokenizer from_json(std::string_view json_text);
  static Tokenizer load(const std::filesystem::path& path);
  std::string to_json() const;
  void save(const std::filesystem::path& path) const;

  std::vector<TokenId> encode(std::string_view text) const;
  void encode_into(std::string_view text, std::vector<TokenId>& out) const;
  // Encodes a single pre-token chunk; the caller guarantees it is one.
  void encode_chunk(std::string_view chunk, std::vector<TokenId>& out) const;

  // Concatenated token bytes. The result may be invalid UTF-8 when `ids` cut
  // through a multi-byte character; check with utf8::is_valid if needed.
  // Throws TokenIdRangeError for ids >= vocab_size().
  std::string decode(std::span<const TokenId> ids) const;

  std::size_t vocab_size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::optional<TokenId> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<MergeRule>& merges() const { return merges_; }
  std::string_view pre_tokenizer() const;

  friend bool operator==(const Tokenizer& a, const Tokenizer& b) {
    return a.tokens_ == b.tokens_ && a.merges_ == b.merges_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<MergeRule> merges_;
  std::unordered_map<std::string, TokenId> ids_;
  detail::MergeTable table_;
  detail::ByteIds byte_ids_{};
};

}  // namespace tokex
