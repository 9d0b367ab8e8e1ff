#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace kp {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

// Comment lines prepended to CSV artifacts.
std::string csv_preamble(const std::string& config_hash, std::uint64_t seed);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace kp
