#pragma once

#include <charconv>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace grindwatch::detail {

std::string_view trim(std::string_view s);

/// Splits on LF, dropping a trailing CR from each line, a leading UTF-8 BOM,
/// and any blank lines at the end of the text.
std::vector<std::string_view> split_lines(std::string_view text);

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

/// Whole-field decimal parse; surrounding blanks are ignored.
bool parse_double(std::string_view field, double& out);
bool parse_u64(std::string_view field, std::uint64_t& out);
bool parse_int(std::string_view field, int& out);

/// Shortest decimal that round-trips to the same double.
void append_double(std::string& out, double v);
std::string format_double(double v);

/// `digits` significant digits, printf %g style.
std::string format_significant(double v, int digits);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace grindwatch::detail
