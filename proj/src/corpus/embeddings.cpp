#include "lcrprobe/corpus/embeddings.hpp"

#include <fstream>
#include <stdexcept>

#include "lcrprobe/corpus/text.hpp"
#include "lcrprobe/numerics/rng.hpp"
#include "lcrprobe/util.hpp"

namespace lcrprobe::corpus {

EmbeddingTable::EmbeddingTable(std::size_t dimension, std::uint64_t oov_seed)
    : dimension_(dimension), oov_seed_(oov_seed) {
  if (dimension_ == 0) throw std::invalid_argument("embedding dimension must be positive");
}

EmbeddingTable EmbeddingTable::load(const std::string& path, std::uint64_t oov_seed,
                                    const std::unordered_set<std::string>* vocab) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);

  std::string line;
  std::size_t line_no = 0;
  std::size_t dimension = 0;
  std::unordered_map<std::string, std::vector<double>> known;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::size_t space = line.find(' ');
    if (space == std::string::npos) {
      throw std::runtime_error("embedding line " + std::to_string(line_no) + ": no values");
    }
    std::string word = line.substr(0, space);
    if (dimension == 0) {
      dimension = util::split_ws(line.substr(space + 1)).size();
      if (dimension == 0) {
        throw std::runtime_error("embedding line 1: could not infer dimension");
      }
    }
    if (vocab && !vocab->count(word)) continue;

    std::vector<double> vec;
    vec.reserve(dimension);
    const char* p = line.c_str() + space;
    char* end = nullptr;
    while (*p) {
      double v = std::strtod(p, &end);
      if (end == p) break;
      vec.push_back(v);
      p = end;
    }
    if (vec.size() != dimension) {
      throw std::runtime_error("embedding line " + std::to_string(line_no) + ": expected " +
                               std::to_string(dimension) + " values, got " +
                               std::to_string(vec.size()));
    }
    known[std::move(word)] = std::move(vec);
  }
  if (dimension == 0) throw std::runtime_error("embedding file is empty: " + path);

  EmbeddingTable table(dimension, oov_seed);
  table.known_ = std::move(known);
  return table;
}

std::vector<double> EmbeddingTable::make_oov(const std::string& key) const {
  num::RandomStreams streams(oov_seed_);
  num::Rng rng(streams.derive_seed("oov/" + key));
  std::vector<double> vec(dimension_);
  for (double& v : vec) v = rng.normal(0.0, kOovStddev);
  return vec;
}

const std::vector<double>& EmbeddingTable::lookup(const std::string& word) const {
  const std::string key = ascii_lower(word);
  auto it = known_.find(key);
  if (it != known_.end()) return it->second;
  auto oov = oov_.find(key);
  if (oov != oov_.end()) return oov->second;
  return oov_.emplace(key, make_oov(key)).first->second;
}

bool EmbeddingTable::known(const std::string& word) const {
  return known_.count(ascii_lower(word)) > 0;
}

void EmbeddingTable::insert(const std::string& word, std::vector<double> vec) {
  if (vec.size() != dimension_) {
    throw std::invalid_argument("embedding for '" + word + "' has dimension " +
                                std::to_string(vec.size()) + ", table expects " +
                                std::to_string(dimension_));
  }
  known_[ascii_lower(word)] = std::move(vec);
}

}  // namespace lcrprobe::corpus
