#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace srbf {

/// Writes to a sibling temp file and renames it over `path`, so readers never
/// observe a truncated file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace srbf
