#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace tokex {

// Byte <-> printable code point bijection used when tokens are written to
// tokenizer files. Printable ASCII (except space) and most of Latin-1 map to
// themselves; the remaining 68 bytes map to U+0100.. in byte order.
char32_t byte_to_codepoint(unsigned char b);
std::optional<unsigned char> codepoint_to_byte(char32_t cp);

// Raw token bytes -> UTF-8 rendering.
std::string render_token(std::string_view bytes);

// Inverse of render_token. Returns nullopt when `rendered` is not valid UTF-8
// or contains a code point outside the table.
std::optional<std::string> parse_token(std::string_view rendered);

}  // namespace tokex
