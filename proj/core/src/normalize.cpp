#include "cowest/core/normalize.hpp"

#include <algorithm>
#include <array>
#include <iterator>

namespace cowest {
namespace {

#include "unicode_tables.inc"

template <std::size_t N>
bool in_ranges(const CodepointRange (&table)[N], char32_t cp) noexcept {
  const auto* it = std::upper_bound(std::begin(table), std::end(table), cp,
                                    [](char32_t v, const CodepointRange& r) { return v < r.lo; });
  if (it == std::begin(table)) return false;
  --it;
  return cp >= it->lo && cp <= it->hi;
}

constexpr char32_t kReplacement = 0xFFFD;

bool is_article(std::u32string_view token) noexcept {
  return token == U"a" || token == U"an" || token == U"the";
}

}  // namespace

namespace unicode {

bool is_punctuation(char32_t cp) noexcept { return in_ranges(kPunctuationRanges, cp); }

bool is_whitespace(char32_t cp) noexcept { return in_ranges(kWhitespaceRanges, cp); }

char32_t to_lower(char32_t cp) noexcept {
  if (cp < 0x80) return (cp >= U'A' && cp <= U'Z') ? cp + 32 : cp;
  const auto* it = std::lower_bound(std::begin(kLowercaseMap), std::end(kLowercaseMap), cp,
                                    [](const CaseMapping& m, char32_t v) { return m.from < v; });
  return (it != std::end(kLowercaseMap) && it->from == cp) ? it->to : cp;
}

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int extra = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
      extra = 1, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3, cp = b0 & 0x07, min = 0x10000;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + extra >= text.size()) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok || cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

}  // namespace unicode

namespace {

std::vector<std::string> tokens_of(std::string_view text, bool drop_articles) {
  std::vector<std::string> tokens;
  std::u32string current;
  auto flush = [&] {
    if (!current.empty() && !(drop_articles && is_article(current)))
      tokens.push_back(unicode::encode_utf8(current));
    current.clear();
  };
  for (char32_t cp : unicode::decode_utf8(text)) {
    if (unicode::is_whitespace(cp)) {
      flush();
    } else if (!unicode::is_punctuation(cp)) {
      current.push_back(unicode::to_lower(cp));
    }
  }
  flush();
  return tokens;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& token : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

}  // namespace

std::vector<std::string> answer_tokens(std::string_view text) { return tokens_of(text, true); }

std::string normalize_answer(std::string_view text) { return join(tokens_of(text, true)); }

std::string normalize_label(std::string_view text) { return join(tokens_of(text, false)); }

}  // namespace cowest
