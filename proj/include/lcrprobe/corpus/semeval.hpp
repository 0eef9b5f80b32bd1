#ifndef LCRPROBE_CORPUS_SEMEVAL_HPP
#define LCRPROBE_CORPUS_SEMEVAL_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lcrprobe::corpus {

enum class Polarity { Positive = 0, Neutral = 1, Negative = 2 };

Polarity parse_polarity(std::string_view text);
std::string_view polarity_name(Polarity p);
inline constexpr std::size_t kPolarityCount = 3;

struct Opinion {
  std::string target;
  std::string category;
  Polarity polarity = Polarity::Positive;
  std::size_t from = 0;  // codepoint offsets into the sentence text
  std::size_t to = 0;

  bool is_explicit() const { return target != "NULL" && from < to; }
};

struct Sentence {
  std::string id;
  std::string text;
  std::vector<Opinion> opinions;
};

struct Review {
  std::string id;
  std::vector<Sentence> sentences;
};

// Materializes every Review/sentence/Opinion element of a Subtask 1 file.
// Character offsets are preserved verbatim. Throws xml::ParseError with an
// element path on malformed input or missing required attributes.
std::vector<Review> parse_semeval(std::string_view xml_doc);

// Drops implicitly stated opinions (target "NULL" or an empty span).
void filter_explicit(std::vector<Review>& reviews);

std::size_t count_opinions(const std::vector<Review>& reviews);

}  // namespace lcrprobe::corpus

#endif
