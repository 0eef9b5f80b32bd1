#include "lcrprobe/corpus/xml.hpp"

#include <cctype>

namespace lcrprobe::corpus::xml {

const std::string* Element::attr(std::string_view key) const {
  for (const auto& [k, v] : attrs) {
    if (k == key) return &v;
  }
  return nullptr;
}

const Element* Element::child(std::string_view name_in) const {
  for (const Element& c : children) {
    if (c.name == name_in) return &c;
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view name_in) const {
  std::vector<const Element*> out;
  for (const Element& c : children) {
    if (c.name == name_in) out.push_back(&c);
  }
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view doc) : doc_(doc) {}

  Element parse_document() {
    if (lookahead("\xEF\xBB\xBF")) pos_ += 3;
    skip_prolog();
    Element root = parse_element();
    skip_misc();
    if (pos_ != doc_.size()) fail("trailing content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::string path;
    for (const std::string& p : path_) path += "/" + p;
    if (path.empty()) path = "/";
    throw ParseError("xml parse error at " + path + " (offset " + std::to_string(pos_) +
                     "): " + msg);
  }

  bool eof() const { return pos_ >= doc_.size(); }
  char peek() const { return doc_[pos_]; }
  bool lookahead(std::string_view s) const { return doc_.substr(pos_, s.size()) == s; }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  void expect(char c) {
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_until(std::string_view end) {
    std::size_t found = doc_.find(end, pos_);
    if (found == std::string_view::npos) fail("unterminated section, missing " + std::string(end));
    pos_ = found + end.size();
  }

  void skip_prolog() {
    skip_ws();
    while (!eof()) {
      if (lookahead("<?")) {
        skip_until("?>");
      } else if (lookahead("<!--")) {
        skip_until("-->");
      } else if (lookahead("<!")) {
        skip_until(">");
      } else {
        break;
      }
      skip_ws();
    }
  }

  void skip_misc() {
    skip_ws();
    while (!eof() && lookahead("<!--")) {
      skip_until("-->");
      skip_ws();
    }
  }

  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           c == ':';
  }

  std::string parse_name() {
    std::size_t start = pos_;
    while (!eof() && name_char(peek())) ++pos_;
    if (pos_ == start) fail("expected a name");
    return std::string(doc_.substr(start, pos_ - start));
  }

  std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
      if (raw[i] != '&') {
        out += raw[i++];
        continue;
      }
      std::size_t semi = raw.find(';', i);
      if (semi == std::string_view::npos || semi - i > 10) {
        // Not a well-formed entity; keep the ampersand literally.
        out += raw[i++];
        continue;
      }
      std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "amp") {
        out += '&';
      } else if (ent == "lt") {
        out += '<';
      } else if (ent == "gt") {
        out += '>';
      } else if (ent == "quot") {
        out += '"';
      } else if (ent == "apos") {
        out += '\'';
      } else if (!ent.empty() && ent[0] == '#') {
        unsigned long cp = 0;
        try {
          cp = ent[1] == 'x' || ent[1] == 'X'
                   ? std::stoul(std::string(ent.substr(2)), nullptr, 16)
                   : std::stoul(std::string(ent.substr(1)), nullptr, 10);
        } catch (const std::exception&) {
          fail("bad character reference &" + std::string(ent) + ";");
        }
        append_utf8(out, cp);
      } else {
        out += '&';
        out += ent;
        out += ';';
      }
      i = semi + 1;
    }
    return out;
  }

  static void append_utf8(std::string& out, unsigned long cp) {
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

  std::string parse_attr_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
    const char quote = peek();
    ++pos_;
    std::size_t start = pos_;
    while (!eof() && peek() != quote) ++pos_;
    if (eof()) fail("unterminated attribute value");
    std::string value = decode_entities(doc_.substr(start, pos_ - start));
    ++pos_;
    return value;
  }

  Element parse_element() {
    expect('<');
    Element el;
    el.name = parse_name();
    path_.push_back(el.name);

    while (true) {
      skip_ws();
      if (eof()) fail("unterminated start tag");
      if (peek() == '>') {
        ++pos_;
        break;
      }
      if (lookahead("/>")) {
        pos_ += 2;
        path_.pop_back();
        return el;
      }
      std::string key = parse_name();
      skip_ws();
      expect('=');
      skip_ws();
      el.attrs.emplace_back(std::move(key), parse_attr_value());
    }

    // Content until the matching end tag.
    while (true) {
      if (eof()) fail("missing end tag </" + el.name + ">");
      if (lookahead("</")) {
        pos_ += 2;
        std::string closing = parse_name();
        if (closing != el.name) fail("mismatched end tag </" + closing + ">");
        skip_ws();
        expect('>');
        path_.pop_back();
        return el;
      }
      if (lookahead("<!--")) {
        skip_until("-->");
        continue;
      }
      if (lookahead("<![CDATA[")) {
        pos_ += 9;
        std::size_t end = doc_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        el.text.append(doc_.substr(pos_, end - pos_));
        pos_ = end + 3;
        continue;
      }
      if (peek() == '<') {
        el.children.push_back(parse_element());
        continue;
      }
      std::size_t start = pos_;
      while (!eof() && peek() != '<') ++pos_;
      el.text += decode_entities(doc_.substr(start, pos_ - start));
    }
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
  std::vector<std::string> path_;
};

}  // namespace

Element parse(std::string_view doc) { return Parser(doc).parse_document(); }

}  // namespace lcrprobe::corpus::xml
