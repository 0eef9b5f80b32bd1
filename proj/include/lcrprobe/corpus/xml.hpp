#ifndef LCRPROBE_CORPUS_XML_HPP
#define LCRPROBE_CORPUS_XML_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lcrprobe::corpus::xml {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Small DOM sufficient for the review corpus schema: elements, attributes,
// character data with entity decoding, comments and CDATA sections.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<Element> children;
  std::string text;  // character data directly inside this element

  const std::string* attr(std::string_view key) const;
  const Element* child(std::string_view name) const;
  std::vector<const Element*> children_named(std::string_view name) const;
};

Element parse(std::string_view doc);

}  // namespace lcrprobe::corpus::xml

#endif
