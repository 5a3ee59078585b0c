#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tokex {

using TokenId = std::uint32_t;

namespace detail {

// Adjacent-pair lookup used by the encoder. Lower priority merges first; the
// priority of a loaded tokenizer's rule is its index in the merge list, the
// extender uses negative priorities for rules placed ahead of the base list.
class MergeTable {
 public:
  struct Entry {
    std::int64_t priority;
    TokenId output;
  };

  void reserve(std::size_t n) { map_.reserve(n); }

  // Returns false if the pair is already present.
  bool insert(TokenId left, TokenId right, Entry entry) {
    return map_.emplace(key(left, right), entry).second;
  }

  const Entry* find(TokenId left, TokenId right) const {
    const auto it = map_.find(key(left, right));
    return it == map_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return map_.size(); }

 private:
  static std::uint64_t key(TokenId l, TokenId r) {
    return (static_cast<std::uint64_t>(l) << 32) | r;
  }

  std::unordered_map<std::uint64_t, Entry> map_;
};

using ByteIds = std::array<TokenId, 256>;

// Segments one pre-token chunk and appends the resulting ids to `out`. At each
// step the applicable pair with the lowest priority is merged; among equal
// priorities the leftmost occurrence goes first.
void encode_chunk(const MergeTable& table, const ByteIds& byte_ids, std::string_view chunk,
                  std::vector<TokenId>& out);

}  // namespace detail
}  // namespace tokex
