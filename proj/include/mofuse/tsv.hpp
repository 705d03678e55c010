#ifndef MOFUSE_TSV_HPP
#define MOFUSE_TSV_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mofuse::tsv {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

/// Strict decimal parse of a whole cell; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view cell);

std::vector<std::string> split(std::string_view line, char delim = '\t');

/// Joins with tabs.
std::string join(const std::vector<std::string>& cells);

std::string_view trim(std::string_view s);

/// Reads all lines, stripping a trailing '\r' from each.
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace mofuse::tsv

#endif
