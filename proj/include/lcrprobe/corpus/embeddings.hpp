#ifndef LCRPROBE_CORPUS_EMBEDDINGS_HPP
#define LCRPROBE_CORPUS_EMBEDDINGS_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace lcrprobe::corpus {

// Word vector store. Known words come from the embedding file; unknown words
// get a normal(0, 0.052) vector derived from the word itself and the OOV
// seed, so the same word resolves to the same vector in any run and in any
// lookup order.
class EmbeddingTable {
 public:
  static constexpr double kOovStddev = 0.052;

  EmbeddingTable(std::size_t dimension, std::uint64_t oov_seed);

  // File format: one line per word, "word v1 v2 ... vD" with space-separated
  // decimals. The dimension comes from the first line. An optional vocabulary
  // filter keeps memory bounded on large files.
  static EmbeddingTable load(const std::string& path, std::uint64_t oov_seed,
                             const std::unordered_set<std::string>* vocab = nullptr);

  const std::vector<double>& lookup(const std::string& word) const;
  bool known(const std::string& word) const;
  void insert(const std::string& word, std::vector<double> vec);

  std::size_t dimension() const { return dimension_; }
  std::size_t known_count() const { return known_.size(); }
  std::size_t oov_count() const { return oov_.size(); }

 private:
  std::vector<double> make_oov(const std::string& key) const;

  std::size_t dimension_;
  std::uint64_t oov_seed_;
  std::unordered_map<std::string, std::vector<double>> known_;
  mutable std::unordered_map<std::string, std::vector<double>> oov_;
};

}  // namespace lcrprobe::corpus

#endif
