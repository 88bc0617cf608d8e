#pragma once

#include <string>

namespace hflow {

// Shortest round-trip decimal representation, independent of the C locale.
std::string format_double(double value);

// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

}  // namespace hflow
