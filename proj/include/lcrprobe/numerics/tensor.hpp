#ifndef LCRPROBE_NUMERICS_TENSOR_HPP
#define LCRPROBE_NUMERICS_TENSOR_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace lcrprobe::num {

// Dense row-major tensor of doubles. Rank 1 tensors double as vectors,
// rank 2 as matrices; a scalar is a rank 1 tensor of length 1.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  Tensor() = default;
  Tensor(std::vector<std::size_t> shape_in, std::vector<double> values_in);

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor scalar(double v);
  static Tensor vector(std::vector<double> v);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> v);

  std::size_t numel() const { return values.size(); }
  std::size_t rank() const { return shape.size(); }
  bool is_vector() const { return shape.size() == 1; }
  bool is_matrix() const { return shape.size() == 2; }
  bool is_scalar() const { return numel() == 1; }

  std::size_t rows() const;
  std::size_t cols() const;

  double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  void fill(double v);
  bool all_finite() const;

  std::string shape_str() const;
};

std::size_t shape_numel(const std::vector<std::size_t>& shape);

// Softmax on raw values (used where no gradient is needed).
std::vector<double> softmax_values(const std::vector<double>& x);

std::size_t argmax_lowest(const std::vector<double>& x);

}  // namespace lcrprobe::num

#endif
