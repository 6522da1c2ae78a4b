#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cowest {

// Open-QA answer normalization: lowercase, drop punctuation (Unicode P* plus
// ASCII symbols), drop the articles "a", "an", "the" as whole tokens, collapse
// whitespace. Input is UTF-8; invalid sequences decode to U+FFFD.
std::string normalize_answer(std::string_view text);

// normalize_answer without article removal, for matching class and choice
// labels ("A" must not vanish).
std::string normalize_label(std::string_view text);

// Whitespace tokens of normalize_answer(text).
std::vector<std::string> answer_tokens(std::string_view text);

namespace unicode {

std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);

bool is_punctuation(char32_t cp) noexcept;
bool is_whitespace(char32_t cp) noexcept;
char32_t to_lower(char32_t cp) noexcept;

}  // namespace unicode
}  // namespace cowest
