#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tmc::text {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Fixed-point rendering with `decimals` digits.
std::string format_fixed(double v, int decimals);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

/// Strict full-string numeric parses; return false on any trailing garbage.
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, std::int64_t& out);

/// Reads a file into memory, transparently inflating gzip content.
/// Throws Error(Io) when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling file and rename, so readers never observe a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// FNV-1a 64-bit digest, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace tmc::text
