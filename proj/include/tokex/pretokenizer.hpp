#pragma once

#include <string_view>
#include <vector>

namespace tokex {

inline constexpr std::string_view kPreTokenizerId = "ws-byte-v1";

// ASCII whitespace: space, \t, \n, \v, \f, \r.
constexpr bool is_ws_byte(char c) {
  return c == ' ' || (c >= '\t' && c <= '\r');
}

// Splits text into the chunks merges may not cross. A chunk is a maximal run
// of non-whitespace bytes plus its single preceding space, if any; every other
// whitespace byte is a chunk of its own. The returned views point into `text`
// and concatenate back to it.
std::vector<std::string_view> pre_tokenize(std::string_view text);

// Calls `fn(chunk)` for every chunk without materializing the list.
template <typename Fn>
void for_each_chunk(std::string_view text, Fn&& fn) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const std::size_t start = i;
    if (!is_ws_byte(text[i])) {
      while (i < n && !is_ws_byte(text[i])) ++i;
    } else if (text[i] == ' ' && i + 1 < n && !is_ws_byte(text[i + 1])) {
      ++i;
      while (i < n && !is_ws_byte(text[i])) ++i;
    } else {
      ++i;
    }
    fn(text.substr(start, i - start));
  }
}

}  // namespace tokex
