#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the parsers.
namespace cloudtrace::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool icontains(std::string_view haystack, std::string_view needle);
bool istarts_with(std::string_view s, std::string_view prefix);
bool iends_with(std::string_view s, std::string_view suffix);
std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string to_hex(std::span<const std::uint8_t> bytes);
bool is_valid_utf8(std::string_view s);

/// Shortest decimal rendering that round-trips the double.
std::string format_double(double v);

std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

/// Last component of a '/' or '\\' separated path.
std::string_view basename(std::string_view path);

/// Decodes the five predefined XML entities and numeric character references.
std::string decode_entities(std::string_view s);

std::string_view as_chars(std::span<const std::uint8_t> bytes);
std::span<const std::uint8_t> as_bytes(std::string_view s);

}  // namespace cloudtrace::text
