#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace audiolib::text {

/// Unicode case folding (NFKC_Casefold). Dotted and dotless i variants are
/// merged afterwards so Turkish titles match regardless of the keyboard
/// layout they were typed on ("SIMYACI" matches "Sımyacı").
std::string fold_case(std::string_view utf8);

/// Trims and collapses every run of Unicode whitespace to a single space.
std::string collapse_whitespace(std::string_view utf8);

std::string trim(std::string_view s);

/// Case-insensitive substring test using fold_case on both sides.
bool contains_folded(std::string_view haystack, std::string_view needle);

/// Number of code points; invalid sequences count one per byte.
std::size_t count_code_points(std::string_view utf8) noexcept;

/// http(s)://host[:port][/...] with a non-empty host and no whitespace.
bool is_absolute_url(std::string_view s);

}  // namespace audiolib::text
