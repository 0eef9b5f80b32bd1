#include "lcrprobe/corpus/semeval.hpp"

#include <stdexcept>

#include "lcrprobe/corpus/text.hpp"
#include "lcrprobe/corpus/xml.hpp"

namespace lcrprobe::corpus {

Polarity parse_polarity(std::string_view text) {
  if (text == "positive") return Polarity::Positive;
  if (text == "neutral") return Polarity::Neutral;
  if (text == "negative") return Polarity::Negative;
  throw std::invalid_argument("unknown polarity '" + std::string(text) + "'");
}

std::string_view polarity_name(Polarity p) {
  switch (p) {
    case Polarity::Positive:
      return "positive";
    case Polarity::Neutral:
      return "neutral";
    case Polarity::Negative:
      return "negative";
  }
  return "?";
}

namespace {

[[noreturn]] void element_error(const std::string& path, const std::string& msg) {
  throw xml::ParseError("semeval parse error at " + path + ": " + msg);
}

const std::string& require_attr(const xml::Element& el, const char* key,
                                const std::string& path) {
  const std::string* v = el.attr(key);
  if (!v) element_error(path, std::string("missing required attribute '") + key + "'");
  return *v;
}

std::size_t parse_offset(const std::string& raw, const char* key, const std::string& path) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(raw, &used);
    if (used != raw.size() || v < 0) throw std::invalid_argument(raw);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    element_error(path, std::string("attribute '") + key + "' is not a valid offset: '" + raw +
                            "'");
  }
}

Opinion parse_opinion(const xml::Element& el, const std::string& path) {
  Opinion op;
  op.target = require_attr(el, "target", path);
  op.category = require_attr(el, "category", path);
  const std::string& pol = require_attr(el, "polarity", path);
  try {
    op.polarity = parse_polarity(pol);
  } catch (const std::invalid_argument& e) {
    element_error(path, e.what());
  }
  op.from = parse_offset(require_attr(el, "from", path), "from", path);
  op.to = parse_offset(require_attr(el, "to", path), "to", path);
  if (op.from > op.to) element_error(path, "from > to");
  return op;
}

Sentence parse_sentence(const xml::Element& el, const std::string& path) {
  Sentence s;
  s.id = require_attr(el, "id", path);
  const xml::Element* text = el.child("text");
  if (!text) element_error(path, "missing <text> element");
  s.text = text->text;
  if (const xml::Element* ops = el.child("Opinions")) {
    std::size_t i = 0;
    for (const xml::Element* op : ops->children_named("Opinion")) {
      s.opinions.push_back(parse_opinion(*op, path + "/Opinions/Opinion[" + std::to_string(i) +
                                                  "]"));
      ++i;
    }
  }
  return s;
}

Review parse_review(const xml::Element& el, const std::string& path) {
  Review r;
  r.id = require_attr(el, "rid", path);
  const xml::Element* sentences = el.child("sentences");
  if (!sentences) element_error(path, "missing <sentences> element");
  std::size_t i = 0;
  for (const xml::Element* s : sentences->children_named("sentence")) {
    r.sentences.push_back(
        parse_sentence(*s, path + "/sentences/sentence[" + std::to_string(i) + "]"));
    ++i;
  }
  return r;
}

}  // namespace

std::vector<Review> parse_semeval(std::string_view xml_doc) {
  xml::Element root = xml::parse(xml_doc);
  std::vector<Review> reviews;
  if (root.name == "Reviews") {
    std::size_t i = 0;
    for (const xml::Element* r : root.children_named("Review")) {
      reviews.push_back(parse_review(*r, "Reviews/Review[" + std::to_string(i) + "]"));
      ++i;
    }
  } else if (root.name == "Review") {
    reviews.push_back(parse_review(root, "Review"));
  } else {
    element_error(root.name, "expected a <Reviews> or <Review> root element");
  }
  return reviews;
}

void filter_explicit(std::vector<Review>& reviews) {
  for (Review& r : reviews) {
    for (Sentence& s : r.sentences) {
      std::erase_if(s.opinions, [](const Opinion& op) { return !op.is_explicit(); });
    }
  }
}

std::size_t count_opinions(const std::vector<Review>& reviews) {
  std::size_t n = 0;
  for (const Review& r : reviews) {
    for (const Sentence& s : r.sentences) n += s.opinions.size();
  }
  return n;
}

}  // namespace lcrprobe::corpus
