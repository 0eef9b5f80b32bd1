#ifndef LCRPROBE_CORPUS_INSTANCES_HPP
#define LCRPROBE_CORPUS_INSTANCES_HPP

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcrprobe/corpus/annotations.hpp"
#include "lcrprobe/corpus/semeval.hpp"
#include "lcrprobe/corpus/text.hpp"

namespace lcrprobe::corpus {

enum class Part { Left, Target, Right };
std::string_view part_name(Part p);

struct AlignmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One (left context, target phrase, right context, polarity) tuple; the
// model's unit of input. Token indices run over the whole sentence, so
// left/target/right concatenated reproduce the sentence token sequence.
struct OpinionInstance {
  std::vector<Token> left;
  std::vector<Token> target;
  std::vector<Token> right;
  Polarity polarity = Polarity::Positive;
  std::string review_id;
  std::string sentence_id;
  std::size_t opinion_index = 0;
  std::string category;

  std::size_t token_count() const { return left.size() + target.size() + right.size(); }
  const Token& token(std::size_t i) const;
  Part part_of(std::size_t i) const;
  bool is_target_token(std::size_t i) const { return part_of(i) == Part::Target; }
  std::string opinion_id() const { return sentence_id + "#" + std::to_string(opinion_index); }
};

// Tokenizes a sentence: sidecar tokens pass through verbatim when present,
// otherwise the fallback tokenizer runs. Throws AlignmentError when an
// annotation token lies outside the sentence text.
std::vector<Token> tokenize_sentence(const std::u32string& text,
                                     const SentenceAnnotation* annotation);

// Splits tokens into left / target / right around the opinion span. A token
// belongs to the target iff its span intersects [from, to). Throws
// AlignmentError when no token overlaps the span.
OpinionInstance split_lcr(const std::vector<Token>& tokens, const Opinion& opinion);

struct CorpusStats {
  std::size_t instances = 0;
  std::array<std::size_t, kPolarityCount> per_class{};
  std::vector<std::string> warnings;
};

// Full path from parsed reviews to model inputs: normalize, tokenize, drop
// implicit opinions, split. Instances whose target cannot be aligned are
// dropped with a warning in the returned stats.
std::vector<OpinionInstance> build_instances(const std::vector<Review>& reviews,
                                             const AnnotationStore* annotations,
                                             CorpusStats* stats);

}  // namespace lcrprobe::corpus

#endif
