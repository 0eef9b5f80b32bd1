#ifndef LCRPROBE_NUMERICS_GRAPH_HPP
#define LCRPROBE_NUMERICS_GRAPH_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lcrprobe/numerics/rng.hpp"
#include "lcrprobe/numerics/tensor.hpp"

namespace lcrprobe::num {

// A named, trainable tensor with its gradient and momentum buffer.
// velocity is all-zeros until the first optimizer step touches it.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor velocity;

  Parameter(std::string name_in, Tensor value_in)
      : name(std::move(name_in)),
        value(std::move(value_in)),
        grad(Tensor::zeros(value.shape)),
        velocity(Tensor::zeros(value.shape)) {}

  void zero_grad() { grad.fill(0.0); }
};

enum class Pointwise { Tanh, Sigmoid, Relu };

// Reverse-mode tape. Operations record a backward closure as they execute;
// backward() replays them in exact reverse order, accumulating gradients
// additively at fan-out nodes. One Graph is confined to one thread.
class Graph {
 public:
  struct Var {
    std::size_t id;
  };

  // Leaf holding a constant input (receives a gradient but is not bound to
  // any Parameter).
  Var input(Tensor value);

  // Leaf bound to a Parameter. Repeated calls with the same Parameter return
  // the same node, so reuse across timesteps accumulates correctly.
  Var param(Parameter& p);

  // a [m x k] times b [k x n] -> [m x n]. A rank-1 operand is treated as
  // k x 1 (right) or 1 x k (left) and the unit axis is dropped from the
  // result.
  Var matmul(Var a, Var b);

  // Elementwise sum; either operand may be a scalar, which broadcasts.
  Var add(Var a, Var b);

  // Adds a length-c vector to every row of an [r x c] matrix.
  Var add_rows(Var m, Var row);

  // Elementwise product of same-shape tensors.
  Var mul(Var a, Var b);

  Var pointwise(Pointwise op, Var x);
  Var tanh(Var x) { return pointwise(Pointwise::Tanh, x); }
  Var sigmoid(Var x) { return pointwise(Pointwise::Sigmoid, x); }
  Var relu(Var x) { return pointwise(Pointwise::Relu, x); }

  // Max-subtracted softmax over a vector of length >= 1.
  Var softmax(Var x);

  // Concatenation of vectors; backward slices the gradient back to parts.
  Var concat(const std::vector<Var>& parts);

  // Elementwise arithmetic mean of equal-length vectors.
  Var mean_pool(const std::vector<Var>& rows);

  // sum_i weights[i] * rows[i]; weights is a vector of length rows.size().
  Var weighted_sum(Var weights, const std::vector<Var>& rows);

  // Inner product of equal-length vectors -> scalar.
  Var dot(Var a, Var b);

  // Inverted dropout: in training mode multiplies by Bernoulli(1-rate)
  // masks scaled by 1/(1-rate); in eval mode the identity.
  Var dropout(Var x, double rate, bool training, Rng& rng);

  // -log softmax(scores)[gold] + lambda * sum over params of ||p||^2.
  // scores must be a vector of pre-softmax logits.
  Var cross_entropy_l2(Var scores, std::size_t gold, const std::vector<Var>& params,
                       double lambda);

  // Mean over rows of -log softmax(row)[gold_row] for an [r x c] logit
  // matrix. Batched counterpart of cross_entropy_l2 with lambda = 0.
  Var cross_entropy_rows(Var logits, const std::vector<std::size_t>& golds);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }

  // Seeds d(root) = 1 (root must be scalar) and runs the reverse sweep.
  void backward(Var root);

  // Adds scale * leaf-gradient into every bound Parameter's grad field.
  void flush_param_grads(double scale);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Graph&)> backward;  // empty for leaves
    Parameter* bound = nullptr;
  };

  Var emplace(Tensor value, std::function<void(Graph&)> backward);
  Tensor& grad_mut(Var v) { return nodes_[v.id].grad; }

  std::vector<Node> nodes_;
  std::unordered_map<Parameter*, std::size_t> param_nodes_;
};

// Initializers. Deterministic given the stream's seed.
Tensor init_uniform(std::vector<std::size_t> shape, double a, double b, Rng& rng);
Tensor init_normal(std::vector<std::size_t> shape, double mean, double stddev, Rng& rng);

// Classical momentum: v <- mu * v - lr * grad; value <- value + v.
// Gradients are zeroed afterwards. mu = 0 reduces to plain SGD.
void sgd_momentum_step(const std::vector<Parameter*>& params, double lr, double mu);

}  // namespace lcrprobe::num

#endif
