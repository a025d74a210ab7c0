#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kgpipe::text {

bool is_space(char c) noexcept;

std::string_view trim(std::string_view s) noexcept;

// ASCII case folding; bytes >= 0x80 pass through untouched.
std::string casefold(std::string_view s);

std::string collapse_whitespace(std::string_view s);

// trim + collapse internal whitespace + case-fold. The identity key for
// unlinked entity mentions and for predicates.
std::string normalize_surface(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);
std::size_t count_words(std::string_view s);

bool starts_with_icase(std::string_view s, std::string_view prefix);
bool contains_icase(std::string_view haystack, std::string_view needle);

// First `max_len` bytes, with "..." appended when cut.
std::string excerpt(std::string_view s, std::size_t max_len = 80);

std::string sha256_hex(std::string_view data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Makes a string usable as a single filename component.
std::string safe_filename(std::string_view s);

}  // namespace kgpipe::text
