#include "tokex/tokenizer.hpp"

#include <nlohmann/json.hpp>

#include <set>

#include "tokex/byte_map.hpp"
#include "tokex/io.hpp"
#include "tokex/pretokenizer.hpp"

namespace tokex {

const char* to_string(TokenizerErrorKind kind) {
  switch (kind) {
    case TokenizerErrorKind::kMalformedJson: return "malformed JSON";
    case TokenizerErrorKind::kUnsupportedFormat: return "unsupported format";
    case TokenizerErrorKind::kInvalidTokenString: return "invalid token string";
    case TokenizerErrorKind::kInvalidVocabIds: return "invalid vocabulary ids";
    case TokenizerErrorKind::kMissingByteToken: return "missing byte token";
    case TokenizerErrorKind::kMalformedMerge: return "malformed merge";
    case TokenizerErrorKind::kMergeReferencesAbsentToken: return "merge references absent token";
    case TokenizerErrorKind::kMergeIdOrder: return "merge output id not above its inputs";
    case TokenizerErrorKind::kDuplicateMerge: return "duplicate merge";
  }
  return "tokenizer error";
}

TokenIdRangeError::TokenIdRangeError(std::uint64_t id, std::size_t vocab_size)
    : ValidationError("token id " + std::to_string(id) + " out of range (vocab size " +
                      std::to_string(vocab_size) + ")"),
      id_(id) {}

namespace {

std::string merge_loc(std::size_t i) { return "merges[" + std::to_string(i) + "]"; }

std::string describe(const MergeRule& m) {
  return "\"" + render_token(m.left) + " " + render_token(m.right) + "\"";
}

}  // namespace

Tokenizer::Tokenizer(std::vector<std::string> tokens, std::vector<MergeRule> merges)
    : tokens_(std::move(tokens)), merges_(std::move(merges)) {
  using K = TokenizerErrorKind;
  ids_.reserve(tokens_.size());
  for (std::size_t id = 0; id < tokens_.size(); ++id) {
    const auto& t = tokens_[id];
    const std::string loc = "vocab[" + std::to_string(id) + "]";
    if (t.empty()) throw TokenizerError(K::kInvalidTokenString, loc, "empty token");
    if (!ids_.emplace(t, static_cast<TokenId>(id)).second) {
      throw TokenizerError(K::kInvalidVocabIds, loc,
                           "token \"" + render_token(t) + "\" appears twice");
    }
  }

  for (unsigned b = 0; b < 256; ++b) {
    const auto it = ids_.find(std::string(1, static_cast<char>(b)));
    if (it == ids_.end()) {
      throw TokenizerError(K::kMissingByteToken, "vocab",
                           "no token for byte " + std::to_string(b) + " (\"" +
                               render_token(std::string(1, static_cast<char>(b))) + "\")");
    }
    byte_ids_[b] = it->second;
  }

  table_.reserve(merges_.size());
  for (std::size_t i = 0; i < merges_.size(); ++i) {
    const auto& m = merges_[i];
    if (m.left.empty() || m.right.empty()) {
      throw TokenizerError(K::kMalformedMerge, merge_loc(i), "empty side in " + describe(m));
    }
    const auto l = ids_.find(m.left);
    const auto r = ids_.find(m.right);
    const auto o = ids_.find(m.output());
    if (l == ids_.end() || r == ids_.end() || o == ids_.end()) {
      const std::string& missing =
          l == ids_.end() ? m.left : (r == ids_.end() ? m.right : m.output());
      throw TokenizerError(K::kMergeReferencesAbsentToken, merge_loc(i),
                           describe(m) + " needs \"" + render_token(missing) + "\"");
    }
    if (o->second <= l->second || o->second <= r->second) {
      throw TokenizerError(K::kMergeIdOrder, merge_loc(i), describe(m));
    }
    if (!table_.insert(l->second, r->second,
                       {static_cast<std::int64_t>(i), o->second})) {
      throw TokenizerError(K::kDuplicateMerge, merge_loc(i), describe(m));
    }
  }
}

Tokenizer Tokenizer::byte_level() {
  std::vector<std::string> tokens;
  tokens.reserve(256);
  for (unsigned b = 0; b < 256; ++b) tokens.emplace_back(1, static_cast<char>(b));
  return Tokenizer(std::move(tokens), {});
}

Tokenizer Tokenizer::from_merges(std::vector<MergeRule> merges) {
  std::vector<std::string> tokens = byte_level().tokens();
  std::set<std::string> seen(tokens.begin(), tokens.end());
  for (const auto& m : merges) {
    auto out = m.output();
    if (seen.insert(out).second) tokens.push_back(std::move(out));
  }
  return Tokenizer(std::move(tokens), std::move(merges));
}

std::string_view Tokenizer::pre_tokenizer() const { return kPreTokenizerId; }

std::optional<TokenId> Tokenizer::find(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void Tokenizer::encode_chunk(std::string_view chunk, std::vector<TokenId>& out) const {
  detail::encode_chunk(table_, byte_ids_, chunk, out);
}

void Tokenizer::encode_into(std::string_view text, std::vector<TokenId>& out) const {
  for_each_chunk(text, [&](std::string_view chunk) {
    detail::encode_chunk(table_, byte_ids_, chunk, out);
  });
}

std::vector<TokenId> Tokenizer::encode(std::string_view text) const {
  std::vector<TokenId> out;
  out.reserve(text.size() / 3 + 1);
  encode_into(text, out);
  return out;
}

std::string Tokenizer::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (const TokenId id : ids) {
    if (id >= tokens_.size()) throw TokenIdRangeError(id, tokens_.size());
    out += tokens_[id];
  }
  return out;
}

// ---- serialization -------------------------------------------------------

Tokenizer Tokenizer::from_json(std::string_view json_text) {
  using K = TokenizerErrorKind;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw TokenizerError(K::kMalformedJson, "byte " + std::to_string(e.byte), e.what());
  }
  if (!j.is_object()) throw TokenizerError(K::kMalformedJson, "$", "top level is not an object");

  const auto version = j.find("version");
  if (version == j.end() || !version->is_number_integer() || version->get<int>() != 1) {
    throw TokenizerError(K::kUnsupportedFormat, "version", "expected 1");
  }
  const auto pre = j.find("pre_tokenizer");
  if (pre == j.end() || !pre->is_string() || pre->get<std::string>() != kPreTokenizerId) {
    throw TokenizerError(K::kUnsupportedFormat, "pre_tokenizer",
                         "expected \"" + std::string(kPreTokenizerId) + "\"");
  }

  const auto vocab = j.find("vocab");
  if (vocab == j.end() || !vocab->is_object()) {
    throw TokenizerError(K::kMalformedJson, "vocab", "missing or not an object");
  }
  std::vector<std::optional<std::string>> slots(vocab->size());
  for (const auto& [key, value] : vocab->items()) {
    const std::string loc = "vocab[\"" + key + "\"]";
    auto bytes = parse_token(key);
    if (!bytes || bytes->empty()) {
      throw TokenizerError(K::kInvalidTokenString, loc, "not a rendered byte string");
    }
    if (!value.is_number_unsigned()) {
      throw TokenizerError(K::kInvalidVocabIds, loc, "id must be a non-negative integer");
    }
    const auto id = value.get<std::uint64_t>();
    if (id >= slots.size()) {
      throw TokenizerError(K::kInvalidVocabIds, loc,
                           "id " + std::to_string(id) + " not below vocab size " +
                               std::to_string(slots.size()));
    }
    if (slots[id]) {
      throw TokenizerError(K::kInvalidVocabIds, loc, "id " + std::to_string(id) + " reused");
    }
    slots[id] = std::move(*bytes);
  }
  std::vector<std::string> tokens;
  tokens.reserve(slots.size());
  for (auto& s : slots) tokens.push_back(std::move(*s));

  const auto merges_j = j.find("merges");
  if (merges_j == j.end() || !merges_j->is_array()) {
    throw TokenizerError(K::kMalformedJson, "merges", "missing or not an array");
  }
  std::vector<MergeRule> merges;
  merges.reserve(merges_j->size());
  for (std::size_t i = 0; i < merges_j->size(); ++i) {
    const auto& m = (*merges_j)[i];
    if (!m.is_string()) throw TokenizerError(K::kMalformedMerge, merge_loc(i), "not a string");
    const auto& s = m.get_ref<const std::string&>();
    const auto space = s.find(' ');
    if (space == std::string::npos || s.find(' ', space + 1) != std::string::npos) {
      throw TokenizerError(K::kMalformedMerge, merge_loc(i),
                           "expected two tokens separated by one space: \"" + s + "\"");
    }
    auto left = parse_token(std::string_view(s).substr(0, space));
    auto right = parse_token(std::string_view(s).substr(space + 1));
    if (!left || !right || left->empty() || right->empty()) {
      throw TokenizerError(K::kMalformedMerge, merge_loc(i), "bad token in \"" + s + "\"");
    }
    merges.push_back({std::move(*left), std::move(*right)});
  }

  return Tokenizer(std::move(tokens), std::move(merges));
}

std::string Tokenizer::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["pre_tokenizer"] = std::string(kPreTokenizerId);
  auto& vocab = j["vocab"] = nlohmann::ordered_json::object();
  for (std::size_t id = 0; id < tokens_.size(); ++id) vocab[render_token(tokens_[id])] = id;
  auto& merges = j["merges"] = nlohmann::ordered_json::array();
  for (const auto& m : merges_) merges.push_back(render_token(m.left) + " " + render_token(m.right));
  return j.dump(2) + "\n";
}

Tokenizer Tokenizer::load(const std::filesystem::path& path) { return from_json(read_file(path)); }

void Tokenizer::save(const std::filesystem::path& path) const { write_file(path, to_json()); }

}  // namespace tokex
