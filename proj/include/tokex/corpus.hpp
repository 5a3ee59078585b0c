#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tokex {

struct Corpus {
  std::vector<std::string> documents;
  std::string source = "inline";

  std::size_t total_bytes() const;
};

// A regular file holds one document per line ('\n' separated; a trailing
// '\r' is dropped, a final newline does not start an empty document). A
// directory holds one document per `.txt` file, read in file-name order.
Corpus load_corpus(const std::filesystem::path& path);

}  // namespace tokex
