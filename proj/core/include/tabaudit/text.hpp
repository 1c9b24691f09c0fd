#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tabaudit::text {

// Replaces every invalid UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

// Decodes valid UTF-8 into Unicode scalar values. Input is assumed to have
// passed through sanitize_utf8; stray invalid bytes decode to U+FFFD.
std::u32string to_scalars(std::string_view utf8);
std::string from_scalars(std::u32string_view scalars);

bool is_ascii(std::string_view s) noexcept;

// Number of Unicode scalar values.
std::size_t scalar_length(std::string_view utf8) noexcept;

// Reads a whole file as bytes and applies sanitize_utf8.
std::string read_file_lossy(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> split(std::string_view s, char delimiter);
std::string join(std::span<const std::string> parts, std::string_view separator);

// Splits into lines on '\n', dropping one trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view s);

std::string_view trim(std::string_view s) noexcept;
bool is_blank(std::string_view s) noexcept;

// Locale-independent parse of the whole token as a double. Accepts a leading
// '+', surrounding ASCII whitespace, and nan/inf spellings.
std::optional<double> parse_number(std::string_view token) noexcept;

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace tabaudit::text
