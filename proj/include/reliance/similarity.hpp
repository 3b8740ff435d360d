#pragma once

#include <cstddef>
#include <string_view>

namespace reliance {

/// Levenshtein distance over Unicode code points.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// 1 - levenshtein(a, b) / max(|a|, |b|) after lowercasing and collapsing
/// whitespace. Two empty strings are identical (1.0).
double text_similarity(std::string_view a, std::string_view b);

}  // namespace reliance
