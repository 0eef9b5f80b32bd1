#ifndef LCRPROBE_CORPUS_ANNOTATIONS_HPP
#define LCRPROBE_CORPUS_ANNOTATIONS_HPP

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace lcrprobe::corpus {

// One row of the annotation sidecar: externally produced token, lemma,
// part-of-speech tag and dependency arc. Token indices are 1-based;
// head == 0 marks the root.
struct AnnotatedToken {
  std::size_t index = 0;
  std::string surface;
  std::string lemma;
  std::string pos;
  std::size_t head = 0;
  std::string dep;
  std::size_t from = 0;
  std::size_t to = 0;
};

struct SentenceAnnotation {
  std::vector<AnnotatedToken> tokens;  // sorted by index
};

class AnnotationStore {
 public:
  AnnotationStore() = default;

  // Line format: sentence_id \t token_index \t surface \t lemma \t pos \t
  // head_index \t dep_label \t from \t to. Empty lines and '#' comments are
  // skipped.
  static AnnotationStore load(const std::string& path);

  const SentenceAnnotation* find(const std::string& sentence_id) const;
  std::size_t sentence_count() const { return by_sentence_.size(); }

 private:
  std::unordered_map<std::string, SentenceAnnotation> by_sentence_;
};

}  // namespace lcrprobe::corpus

#endif
