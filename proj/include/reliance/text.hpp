#pragma once

// Small text helpers shared by the rule classifier and the similarity code.

#include <string>
#include <string_view>
#include <vector>

namespace reliance::text {

/// Decodes UTF-8; invalid bytes decode as U+FFFD.
std::u32string decode_utf8(std::string_view bytes);

/// Number of code points in a UTF-8 string.
std::size_t utf8_length(std::string_view bytes);

/// ASCII lowercase; other bytes pass through.
std::string to_lower(std::string_view s);

/// Lowercases, collapses whitespace runs to one space and trims.
std::string normalize(std::string_view s);

/// Lowercase word tokens: runs of [a-z0-9_$'] (apostrophes kept so "don't" stays whole).
std::vector<std::string> words(std::string_view s);

/// Identifier-like tokens as they appear in code: [A-Za-z_$][A-Za-z0-9_$]*, case preserved.
std::vector<std::string> identifiers(std::string_view s);

/// True when `needle` (already lowercase) occurs in lowercase `haystack` with
/// no word character directly before or after it. Returns the first position
/// or npos.
std::size_t find_term(std::string_view haystack_lower, std::string_view needle_lower,
                      std::size_t from = 0);

bool is_word_char(char c);

}  // namespace reliance::text
