#pragma once

#include <string>

namespace polnlos {

/// Whole file as bytes. Throws FormatError when it cannot be opened.
std::string read_file(const std::string& path);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace polnlos
