#pragma once

#include <string>

namespace strategem {

// Reads a whole file; throws ValidationError if it cannot be opened.
std::string read_file(const std::string& path);

// Writes via a temp file in the same directory plus rename, so concurrent
// writers never leave partial files behind.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace strategem
