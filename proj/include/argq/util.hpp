#ifndef ARGQ_UTIL_HPP
#define ARGQ_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace argq::util {

// 64-bit FNV-1a; stable across platforms, used for fingerprints and provenance.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ULL);
std::string hex64(std::uint64_t value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Lines of a UTF-8 list file with "#" comments and blank lines removed and
// surrounding whitespace trimmed.
std::vector<std::string> read_list_file(const std::filesystem::path& path);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace argq::util

#endif  // ARGQ_UTIL_HPP
