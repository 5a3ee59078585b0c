#include "tokex/byte_map.hpp"

#include <array>

#include "tokex/utf8.hpp"

namespace tokex {
namespace {

constexpr bool is_self_mapped(unsigned b) {
  return (b >= 0x21 && b <= 0x7E) || (b >= 0xA1 && b <= 0xAC) || (b >= 0xAE && b <= 0xFF);
}

struct ByteTable {
  std::array<char32_t, 256> to_cp{};
  // Every mapped code point is below U+0100 + 68.
  std::array<int, 0x144> to_byte{};
  std::array<std::string, 256> rendered{};

  ByteTable() {
    to_byte.fill(-1);
    char32_t extra = 0;
    for (unsigned b = 0; b < 256; ++b) {
      to_cp[b] = is_self_mapped(b) ? static_cast<char32_t>(b) : 0x100 + extra++;
      to_byte[to_cp[b]] = static_cast<int>(b);
      utf8::append(rendered[b], to_cp[b]);
    }
  }
};

const ByteTable& table() {
  static const ByteTable t;
  return t;
}

}  // namespace

char32_t byte_to_codepoint(unsigned char b) { return table().to_cp[b]; }

std::optional<unsigned char> codepoint_to_byte(char32_t cp) {
  if (cp >= table().to_byte.size()) return std::nullopt;
  const int b = table().to_byte[cp];
  if (b < 0) return std::nullopt;
  return static_cast<unsigned char>(b);
}

std::string render_token(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const char c : bytes) out += table().rendered[static_cast<unsigned char>(c)];
  return out;
}

std::optional<std::string> parse_token(std::string_view rendered) {
  std::string out;
  out.reserve(rendered.size());
  std::size_t pos = 0;
  while (pos < rendered.size()) {
    const auto cp = utf8::next(rendered, pos);
    if (!cp) return std::nullopt;
    const auto b = codepoint_to_byte(*cp);
    if (!b) return std::nullopt;
    out.push_back(static_cast<char>(*b));
  }
  return out;
}

}  // namespace tokex
