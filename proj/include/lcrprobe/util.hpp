#ifndef LCRPROBE_UTIL_HPP
#define LCRPROBE_UTIL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lcrprobe::util {

// Shortest decimal form that round-trips an IEEE double through strtod.
std::string format_double(double v);

double parse_double(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);
std::vector<std::string> split_ws(std::string_view text);
std::string_view trim(std::string_view text);

bool starts_with(std::string_view text, std::string_view prefix);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
bool file_exists(const std::string& path);

std::uint64_t fnv1a64(std::string_view text);

}  // namespace lcrprobe::util

#endif
