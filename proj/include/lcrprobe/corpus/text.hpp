#ifndef LCRPROBE_CORPUS_TEXT_HPP
#define LCRPROBE_CORPUS_TEXT_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lcrprobe::corpus {

// All span arithmetic runs over codepoints, matching the character offsets
// in the corpus annotations. Invalid UTF-8 bytes pass through as their own
// codepoints rather than failing the whole file.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);

// Long dashes become "-" and typographic apostrophes become "'", one
// codepoint for one codepoint so existing character offsets stay valid.
std::string normalize_chars(std::string_view text);
std::u32string normalize_chars(std::u32string text);

std::string ascii_lower(std::string_view text);

struct Token {
  std::string surface;
  std::string lemma;
  std::size_t from = 0;  // codepoint span [from, to) in the sentence text
  std::size_t to = 0;
  std::size_t index = 0;
};

// Whitespace split with leading/trailing punctuation detached as separate
// tokens; lemma is the lowercased surface. Used when no annotation sidecar
// covers a sentence.
std::vector<Token> fallback_tokenize(const std::u32string& text);
std::vector<Token> fallback_tokenize(std::string_view text);

}  // namespace lcrprobe::corpus

#endif
