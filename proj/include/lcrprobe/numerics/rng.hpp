#ifndef LCRPROBE_NUMERICS_RNG_HPP
#define LCRPROBE_NUMERICS_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace lcrprobe::num {

// Deterministic random stream. The engine (mt19937_64) has a
// standard-specified output sequence, and the double generation below is
// self-contained, so a seed pins the exact sample sequence across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Box-Muller with a cached spare.
  double normal(double mean, double stddev);

  bool bernoulli(double p) { return uniform() < p; }

  // Unbiased integer in [0, n) via rejection sampling.
  std::size_t below(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Fans one root seed out into independent named streams, so each component
// (init, dropout, shuffling, sampling) draws from its own sequence.
class RandomStreams {
 public:
  explicit RandomStreams(std::uint64_t root) : root_(root) {}

  std::uint64_t root() const { return root_; }
  std::uint64_t derive_seed(std::string_view name) const;
  Rng stream(std::string_view name) const { return Rng(derive_seed(name)); }

 private:
  std::uint64_t root_;
};

}  // namespace lcrprobe::num

#endif
