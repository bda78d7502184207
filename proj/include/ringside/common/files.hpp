#pragma once

#include <filesystem>
#include <string>

namespace ringside {

// Throws StorageError.
std::string read_file(const std::filesystem::path& path);
// Writes a sibling temp file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace ringside
