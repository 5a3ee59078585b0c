#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace tokex::utf8 {

bool is_valid(std::string_view s);

// Decodes the code point starting at `pos` and advances `pos`. Returns nullopt
// (and advances by one byte) on malformed input.
std::optional<char32_t> next(std::string_view s, std::size_t& pos);

void append(std::string& out, char32_t cp);

bool is_unicode_whitespace(char32_t cp);

// Number of maximal runs of non-whitespace code points. Malformed bytes count
// as non-whitespace.
std::size_t count_words(std::string_view s);

}  // namespace tokex::utf8
