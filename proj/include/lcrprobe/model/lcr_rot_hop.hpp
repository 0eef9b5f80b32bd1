#ifndef LCRPROBE_MODEL_LCR_ROT_HOP_HPP
#define LCRPROBE_MODEL_LCR_ROT_HOP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "lcrprobe/corpus/embeddings.hpp"
#include "lcrprobe/corpus/instances.hpp"
#include "lcrprobe/numerics/graph.hpp"
#include "lcrprobe/numerics/rng.hpp"
#include "lcrprobe/numerics/tensor.hpp"

namespace lcrprobe::model {

struct HyperParams {
  std::size_t hops = 10;
  std::size_t hidden = 300;  // d per direction; hidden states have dimension 2d
  std::size_t epochs = 150;
  double learning_rate = 0.05;
  double l2_lambda = 1e-5;
  double momentum = 0.9;
  std::size_t batch_size = 20;
  double dropout_rate = 0.5;
  double forget_bias = 1.0;      // LSTM forget-gate bias at init
  bool dropout_sentence = true;  // dropout on s before the output layer
  std::uint64_t seed = 42;

  void validate() const;
};

inline constexpr std::size_t kClassCount = 3;

// One LSTM direction: four gates, each a weight matrix over [input; hidden]
// plus a bias.
struct LstmCell {
  num::Parameter w_input, w_forget, w_output, w_cand;
  num::Parameter b_input, b_forget, b_output, b_cand;

  LstmCell(const std::string& prefix, std::size_t input_dim, std::size_t hidden,
           double forget_bias, num::Rng& init);
  void collect(std::vector<num::Parameter*>& weights, std::vector<num::Parameter*>& biases);
};

struct BiLstm {
  LstmCell fwd;
  LstmCell bwd;

  BiLstm(const std::string& prefix, std::size_t input_dim, std::size_t hidden,
         double forget_bias, num::Rng& init);
};

// Bilinear attention parameters: score(h, q) = tanh(h' W q + b).
struct Bilinear {
  num::Parameter w;  // 2d x 2d
  num::Parameter b;  // scalar

  Bilinear(const std::string& prefix, std::size_t hidden2, num::Rng& init);
};

// All trainable parameters of the network: three Bi-LSTM encoders, four
// bilinear attentions and the output layer. Addresses must stay stable while
// graphs reference them, so the set is neither copyable nor movable.
struct ModelParams {
  std::size_t embed_dim;
  std::size_t hidden;

  BiLstm left, target, right;
  Bilinear ctx_left, ctx_right, tgt_left, tgt_right;
  num::Parameter w_out;  // 3 x 8d
  num::Parameter b_out;  // 3

  ModelParams(std::size_t embed_dim, const HyperParams& hp, num::Rng& init);
  ModelParams(const ModelParams&) = delete;
  ModelParams& operator=(const ModelParams&) = delete;

  std::vector<num::Parameter*> all();
  std::vector<num::Parameter*> weights();  // L2 applies to these only
};

// Every intermediate quantity of one forward pass, as plain tensors.
struct ForwardTrace {
  std::vector<num::Tensor> hidden_left, hidden_target, hidden_right;  // 2d each
  num::Tensor target_pool;  // average-pooled target representation

  struct Hop {
    num::Tensor alpha_left, alpha_right;                // attention over contexts
    num::Tensor alpha_target_left, alpha_target_right;  // attention over the target
    num::Tensor repr_left, repr_right;                  // r^l, r^r
    num::Tensor repr_target_left, repr_target_right;    // left/right-aware target
  };
  std::vector<Hop> hops;

  num::Tensor sentence;       // concat of the final four representations, 8d
  num::Tensor logits;         // 3 classes
  num::Tensor probabilities;  // softmax of logits
  std::size_t predicted = 0;  // argmax, ties to the lowest class index
};

enum class Mode { Train, Eval };

// score_i = tanh(h_i' W q + b), alpha = softmax(scores), r = sum alpha_i h_i.
// states must be non-empty.
num::Graph::Var attend(num::Graph& g, const std::vector<num::Graph::Var>& states,
                       num::Graph::Var query, Bilinear& att, num::Tensor* alpha_out = nullptr);

struct ForwardPass {
  num::Graph graph;
  num::Graph::Var logits{0};
  std::vector<num::Graph::Var> param_vars;  // bound parameters, for in-graph L2
  ForwardTrace trace;
};

// Runs encode, the n-hop rotatory attention loop and the output layer.
// Train mode draws dropout masks from dropout_rng; eval mode is
// deterministic and ignores it.
ForwardPass run_forward(const corpus::OpinionInstance& instance,
                        const corpus::EmbeddingTable& table, ModelParams& params,
                        const HyperParams& hp, Mode mode, num::Rng* dropout_rng);

ForwardTrace forward_eval(const corpus::OpinionInstance& instance,
                          const corpus::EmbeddingTable& table, ModelParams& params,
                          const HyperParams& hp);

}  // namespace lcrprobe::model

#endif
