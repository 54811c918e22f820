#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace coral {

// Hex-encoded SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

bool is_ascii_space(char c);

// True when byte is a UTF-8 continuation byte (0b10xxxxxx).
bool is_utf8_continuation(unsigned char c);

// Largest cut position <= pos that does not split a UTF-8 sequence.
std::size_t utf8_floor_boundary(std::string_view text, std::size_t pos);

// Truncates at a UTF-8 boundary; no-op when text already fits.
std::string truncate_utf8(std::string_view text, std::size_t max_bytes);

// Half-point fixed-point rendering: 21 -> "10.5", 22 -> "11.0".
std::string format_half_points(int twice_value);

std::string to_lower_ascii(std::string_view text);

} // namespace coral
