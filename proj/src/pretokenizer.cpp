#include "tokex/pretokenizer.hpp"

namespace tokex {

std::vector<std::string_view> pre_tokenize(std::string_view text) {
  std::vector<std::string_view> chunks;
  for_each_chunk(text, [&](std::string_view c) { chunks.push_back(c); });
  return chunks;
}

}  // namespace tokex
