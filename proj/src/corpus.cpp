#include "tokex/corpus.hpp"

#include <algorithm>

#include "tokex/errors.hpp"
#include "tokex/io.hpp"

namespace tokex {

std::size_t Corpus::total_bytes() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.size();
  return n;
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::size_t stop = end;
    if (stop > start && text[stop - 1] == '\r') --stop;
    lines.emplace_back(text, start, stop - start);
    start = end + 1;
  }
  return lines;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  Corpus corpus;
  corpus.source = path.string();
  if (fs::is_directory(path, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files.push_back(entry.path());
      }
    }
    if (ec) throw IoError("cannot list " + path.string() + ": " + ec.message());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) corpus.documents.push_back(read_file(f));
    return corpus;
  }
  if (!fs::exists(path, ec)) throw IoError("corpus not found: " + path.string());
  corpus.documents = split_lines(read_file(path));
  return corpus;
}

}  // namespace tokex
