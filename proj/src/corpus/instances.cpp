#include "lcrprobe/corpus/instances.hpp"

#include <stdexcept>

namespace lcrprobe::corpus {

std::string_view part_name(Part p) {
  switch (p) {
    case Part::Left:
      return "left";
    case Part::Target:
      return "target";
    case Part::Right:
      return "right";
  }
  return "?";
}

const Token& OpinionInstance::token(std::size_t i) const {
  if (i < left.size()) return left[i];
  i -= left.size();
  if (i < target.size()) return target[i];
  i -= target.size();
  return right.at(i);
}

Part OpinionInstance::part_of(std::size_t i) const {
  if (i < left.size()) return Part::Left;
  if (i < left.size() + target.size()) return Part::Target;
  return Part::Right;
}

std::vector<Token> tokenize_sentence(const std::u32string& text,
                                     const SentenceAnnotation* annotation) {
  if (!annotation) return fallback_tokenize(text);

  std::vector<Token> tokens;
  tokens.reserve(annotation->tokens.size());
  std::size_t prev_end = 0;
  for (const AnnotatedToken& at : annotation->tokens) {
    if (at.from >= at.to || at.to > text.size()) {
      throw AlignmentError("annotated token '" + at.surface + "' span (" +
                           std::to_string(at.from) + "," + std::to_string(at.to) +
                           ") outside sentence of length " + std::to_string(text.size()));
    }
    if (at.from < prev_end) {
      throw AlignmentError("annotated token '" + at.surface + "' overlaps the previous token");
    }
    prev_end = at.to;
    Token t;
    t.surface = at.surface;
    t.lemma = at.lemma;
    t.from = at.from;
    t.to = at.to;
    t.index = tokens.size();
    tokens.push_back(std::move(t));
  }
  return tokens;
}

OpinionInstance split_lcr(const std::vector<Token>& tokens, const Opinion& opinion) {
  std::size_t first = tokens.size();
  std::size_t last = 0;
  bool any = false;
  for (const Token& t : tokens) {
    const bool overlaps = t.from < opinion.to && t.to > opinion.from;
    if (overlaps) {
      if (!any) first = t.index;
      last = t.index;
      any = true;
    }
  }
  if (!any) {
    std::string nearest;
    for (const Token& t : tokens) {
      if (t.to <= opinion.from || nearest.empty()) nearest = t.surface;
    }
    throw AlignmentError("no token overlaps target span (" + std::to_string(opinion.from) + "," +
                         std::to_string(opinion.to) + ") for target '" + opinion.target +
                         "'; nearest token '" + nearest + "'");
  }

  OpinionInstance inst;
  inst.polarity = opinion.polarity;
  inst.category = opinion.category;
  for (const Token& t : tokens) {
    if (t.index < first) {
      inst.left.push_back(t);
    } else if (t.index <= last) {
      inst.target.push_back(t);
    } else {
      inst.right.push_back(t);
    }
  }
  return inst;
}

std::vector<OpinionInstance> build_instances(const std::vector<Review>& reviews,
                                             const AnnotationStore* annotations,
                                             CorpusStats* stats) {
  std::vector<OpinionInstance> instances;
  CorpusStats local;
  for (const Review& review : reviews) {
    for (const Sentence& sentence : review.sentences) {
      const std::u32string text = normalize_chars(utf8_decode(sentence.text));
      const SentenceAnnotation* ann = annotations ? annotations->find(sentence.id) : nullptr;

      std::vector<Token> tokens;
      try {
        tokens = tokenize_sentence(text, ann);
      } catch (const AlignmentError& e) {
        local.warnings.push_back("sentence " + sentence.id + ": " + e.what());
        continue;
      }

      std::size_t op_index = 0;
      for (const Opinion& op : sentence.opinions) {
        const std::size_t this_index = op_index++;
        if (!op.is_explicit()) continue;
        try {
          OpinionInstance inst = split_lcr(tokens, op);
          inst.review_id = review.id;
          inst.sentence_id = sentence.id;
          inst.opinion_index = this_index;
          local.per_class[static_cast<std::size_t>(inst.polarity)]++;
          local.instances++;
          instances.push_back(std::move(inst));
        } catch (const AlignmentError& e) {
          local.warnings.push_back("sentence " + sentence.id + " opinion " +
                                   std::to_string(this_index) + ": " + e.what());
        }
      }
    }
  }
  if (stats) *stats = std::move(local);
  return instances;
}

}  // namespace lcrprobe::corpus
