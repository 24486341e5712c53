#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gestid::text {

// 17 significant digits: enough for every double to round-trip exactly.
std::string format_real(double value);

// Strict parses: the whole field must be consumed. Return false on failure.
bool parse_real(std::string_view field, double& out);
bool parse_int(std::string_view field, long& out);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view line, char sep);

std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace gestid::text
