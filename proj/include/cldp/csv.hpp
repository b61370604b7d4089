#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cldp {

/// Shortest decimal representation that round-trips ('.' separator).
std::string format_double(double v);

/// Parses a double in the C locale; throws std::invalid_argument naming
/// `what` on failure.
double parse_double(std::string_view text, std::string_view what);

/// Splits a line on commas (no quoting; none of our files need it).
std::vector<std::string> split_csv_line(std::string_view line);

/// Writes `content` to a sibling temp file and renames it over `path`, so
/// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Appends `rows` to a CSV file atomically, writing `header` first if the
/// file does not exist yet.
void append_csv_atomic(const std::filesystem::path& path, std::string_view header, std::string_view rows);

std::string read_file(const std::filesystem::path& path);

}  // namespace cldp
