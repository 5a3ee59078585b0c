#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace tokex {

// Whole-file helpers; both throw IoError with the path in the message.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace tokex
