#pragma once

// Small UTF-8 text helpers shared by the lints, the heading editor and the
// corpus codecs. Whitespace means the ASCII whitespace characters only.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace parannot::text {

bool is_valid_utf8(std::string_view s);

bool is_space(char c);

std::string_view trim(std::string_view s);

bool is_blank(std::string_view s);

/// Trim and collapse every whitespace run into a single space.
std::string normalize_whitespace(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);

/// True for ASCII punctuation and the common Unicode punctuation blocks.
bool is_punctuation(char32_t cp);

/// Strip leading and trailing punctuation code points.
std::string strip_punctuation(std::string_view token);

/// Lowercase ASCII, Latin-1 and Latin Extended-A letters; other code points
/// pass through unchanged.
std::string fold_case(std::string_view s);

/// Levenshtein distance over whole tokens.
std::size_t token_edit_distance(std::span<const std::string> a, std::span<const std::string> b);

}  // namespace parannot::text
