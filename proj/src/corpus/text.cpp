#include "lcrprobe/corpus/text.hpp"

#include <cctype>

namespace lcrprobe::corpus {

std::u32string utf8_decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t cp = c;
    if (c >= 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else if (c >= 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if (c >= 0xC0) {
      len = 2;
      cp = c & 0x1F;
    }
    if (len == 1 || i + len > text.size()) {
      out.push_back(c);
      ++i;
      continue;
    }
    bool valid = true;
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) {
        valid = false;
        break;
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    if (!valid) {
      out.push_back(c);
      ++i;
    } else {
      out.push_back(cp);
      i += len;
    }
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }
  return out;
}

std::u32string normalize_chars(std::u32string text) {
  for (char32_t& cp : text) {
    if (cp == U'—' || cp == U'–') cp = U'-';
    if (cp == U'’') cp = U'\'';
  }
  return text;
}

std::string normalize_chars(std::string_view text) {
  return utf8_encode(normalize_chars(utf8_decode(text)));
}

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

namespace {

bool is_space_cp(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
         cp == U'\v' || cp == U' ';
}

bool is_detachable_punct(char32_t cp) {
  if (cp < 0x80) return std::ispunct(static_cast<int>(cp)) != 0;
  return cp == U'“' || cp == U'”' || cp == U'‘' || cp == U'…';
}

}  // namespace

std::vector<Token> fallback_tokenize(const std::u32string& text) {
  std::vector<Token> tokens;
  auto emit = [&](std::size_t from, std::size_t to) {
    Token t;
    t.surface = utf8_encode(std::u32string_view(text).substr(from, to - from));
    t.lemma = ascii_lower(t.surface);
    t.from = from;
    t.to = to;
    t.index = tokens.size();
    tokens.push_back(std::move(t));
  };

  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space_cp(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space_cp(text[i])) ++i;
    if (i == start) continue;

    std::size_t lo = start;
    std::size_t hi = i;
    while (lo < hi && is_detachable_punct(text[lo])) {
      emit(lo, lo + 1);
      ++lo;
    }
    std::size_t core_end = hi;
    while (core_end > lo && is_detachable_punct(text[core_end - 1])) --core_end;
    if (core_end > lo) emit(lo, core_end);
    for (std::size_t k = core_end; k < hi; ++k) emit(k, k + 1);
  }
  return tokens;
}

std::vector<Token> fallback_tokenize(std::string_view text) {
  return fallback_tokenize(utf8_decode(text));
}

}  // namespace lcrprobe::corpus
