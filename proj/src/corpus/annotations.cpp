#include "lcrprobe/corpus/annotations.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "lcrprobe/util.hpp"

namespace lcrprobe::corpus {

namespace {

std::size_t parse_index(const std::string& raw, std::size_t line_no, const char* what) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(raw, &used);
    if (used != raw.size() || v < 0) throw std::invalid_argument(raw);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw std::runtime_error("annotation line " + std::to_string(line_no) + ": bad " + what +
                             " '" + raw + "'");
  }
}

}  // namespace

AnnotationStore AnnotationStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open annotation file: " + path);

  AnnotationStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = util::split(line, '\t');
    if (fields.size() != 9) {
      throw std::runtime_error("annotation line " + std::to_string(line_no) + ": expected 9 " +
                               "tab-separated fields, got " + std::to_string(fields.size()));
    }
    AnnotatedToken tok;
    tok.index = parse_index(fields[1], line_no, "token index");
    if (tok.index == 0) {
      throw std::runtime_error("annotation line " + std::to_string(line_no) +
                               ": token indices are 1-based");
    }
    tok.surface = fields[2];
    tok.lemma = fields[3];
    tok.pos = fields[4];
    tok.head = parse_index(fields[5], line_no, "head index");
    tok.dep = fields[6];
    tok.from = parse_index(fields[7], line_no, "from offset");
    tok.to = parse_index(fields[8], line_no, "to offset");
    store.by_sentence_[fields[0]].tokens.push_back(std::move(tok));
  }

  for (auto& [id, ann] : store.by_sentence_) {
    std::sort(ann.tokens.begin(), ann.tokens.end(),
              [](const AnnotatedToken& a, const AnnotatedToken& b) { return a.index < b.index; });
    for (std::size_t i = 0; i < ann.tokens.size(); ++i) {
      if (ann.tokens[i].index != i + 1) {
        throw std::runtime_error("annotation for sentence " + id +
                                 ": token indices are not contiguous from 1");
      }
      if (ann.tokens[i].head > ann.tokens.size()) {
        throw std::runtime_error("annotation for sentence " + id + ": head index " +
                                 std::to_string(ann.tokens[i].head) + " out of range");
      }
    }
  }
  return store;
}

const SentenceAnnotation* AnnotationStore::find(const std::string& sentence_id) const {
  auto it = by_sentence_.find(sentence_id);
  return it == by_sentence_.end() ? nullptr : &it->second;
}

}  // namespace lcrprobe::corpus
