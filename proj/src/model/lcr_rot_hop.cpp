#include "lcrprobe/model/lcr_rot_hop.hpp"

#include <stdexcept>

namespace lcrprobe::model {

using num::Graph;
using num::Parameter;
using num::Rng;
using num::Tensor;

void HyperParams::validate() const {
  if (hops < 1) throw std::invalid_argument("hops must be >= 1");
  if (hidden < 1) throw std::invalid_argument("hidden size must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw std::invalid_argument("dropout rate must lie in [0, 1)");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("momentum must lie in [0, 1)");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (l2_lambda < 0.0) throw std::invalid_argument("l2 lambda must be nonnegative");
}

namespace {
constexpr double kInitLow = -0.1;
constexpr double kInitHigh = 0.1;
}  // namespace

LstmCell::LstmCell(const std::string& prefix, std::size_t input_dim, std::size_t hidden,
                   double forget_bias, Rng& init)
    : w_input(prefix + ".w_input",
              num::init_uniform({hidden, input_dim + hidden}, kInitLow, kInitHigh, init)),
      w_forget(prefix + ".w_forget",
               num::init_uniform({hidden, input_dim + hidden}, kInitLow, kInitHigh, init)),
      w_output(prefix + ".w_output",
               num::init_uniform({hidden, input_dim + hidden}, kInitLow, kInitHigh, init)),
      w_cand(prefix + ".w_cand",
             num::init_uniform({hidden, input_dim + hidden}, kInitLow, kInitHigh, init)),
      b_input(prefix + ".b_input", Tensor::zeros({hidden})),
      b_forget(prefix + ".b_forget", Tensor::zeros({hidden})),
      b_output(prefix + ".b_output", Tensor::zeros({hidden})),
      b_cand(prefix + ".b_cand", Tensor::zeros({hidden})) {
  b_forget.value.fill(forget_bias);
}

void LstmCell::collect(std::vector<Parameter*>& weights, std::vector<Parameter*>& biases) {
  weights.push_back(&w_input);
  weights.push_back(&w_forget);
  weights.push_back(&w_output);
  weights.push_back(&w_cand);
  biases.push_back(&b_input);
  biases.push_back(&b_forget);
  biases.push_back(&b_output);
  biases.push_back(&b_cand);
}

BiLstm::BiLstm(const std::string& prefix, std::size_t input_dim, std::size_t hidden,
               double forget_bias, Rng& init)
    : fwd(prefix + ".fwd", input_dim, hidden, forget_bias, init),
      bwd(prefix + ".bwd", input_dim, hidden, forget_bias, init) {}

Bilinear::Bilinear(const std::string& prefix, std::size_t hidden2, Rng& init)
    : w(prefix + ".w", num::init_uniform({hidden2, hidden2}, kInitLow, kInitHigh, init)),
      b(prefix + ".b", Tensor::zeros({1})) {}

ModelParams::ModelParams(std::size_t embed_dim_in, const HyperParams& hp, Rng& init)
    : embed_dim(embed_dim_in),
      hidden(hp.hidden),
      left("left", embed_dim, hp.hidden, hp.forget_bias, init),
      target("target", embed_dim, hp.hidden, hp.forget_bias, init),
      right("right", embed_dim, hp.hidden, hp.forget_bias, init),
      ctx_left("ctx_left", 2 * hp.hidden, init),
      ctx_right("ctx_right", 2 * hp.hidden, init),
      tgt_left("tgt_left", 2 * hp.hidden, init),
      tgt_right("tgt_right", 2 * hp.hidden, init),
      w_out("out.w", num::init_uniform({kClassCount, 8 * hp.hidden}, kInitLow, kInitHigh, init)),
      b_out("out.b", Tensor::zeros({kClassCount})) {}

std::vector<Parameter*> ModelParams::all() {
  std::vector<Parameter*> weights_list;
  std::vector<Parameter*> biases_list;
  for (BiLstm* enc : {&left, &target, &right}) {
    enc->fwd.collect(weights_list, biases_list);
    enc->bwd.collect(weights_list, biases_list);
  }
  for (Bilinear* att : {&ctx_left, &ctx_right, &tgt_left, &tgt_right}) {
    weights_list.push_back(&att->w);
    biases_list.push_back(&att->b);
  }
  weights_list.push_back(&w_out);
  biases_list.push_back(&b_out);

  std::vector<Parameter*> out = std::move(weights_list);
  out.insert(out.end(), biases_list.begin(), biases_list.end());
  return out;
}

std::vector<Parameter*> ModelParams::weights() {
  std::vector<Parameter*> weights_list;
  std::vector<Parameter*> biases_list;
  for (BiLstm* enc : {&left, &target, &right}) {
    enc->fwd.collect(weights_list, biases_list);
    enc->bwd.collect(weights_list, biases_list);
  }
  for (Bilinear* att : {&ctx_left, &ctx_right, &tgt_left, &tgt_right}) {
    weights_list.push_back(&att->w);
  }
  weights_list.push_back(&w_out);
  return weights_list;
}

namespace {

struct Builder {
  Graph& g;
  ModelParams& params;
  const HyperParams& hp;
  Mode mode;
  Rng* dropout_rng;

  Graph::Var maybe_dropout(Graph::Var x) {
    const bool training = mode == Mode::Train && hp.dropout_rate > 0.0;
    if (!training) return x;
    return g.dropout(x, hp.dropout_rate, true, *dropout_rng);
  }

  // One LSTM sweep; returns per-position hidden states in sequence order.
  std::vector<Graph::Var> lstm_sweep(LstmCell& cell, const std::vector<Graph::Var>& inputs,
                                     bool reversed) {
    const std::size_t d = params.hidden;
    std::vector<Graph::Var> states(inputs.size(), Graph::Var{0});
    Graph::Var h = g.input(Tensor::zeros({d}));
    Graph::Var c = g.input(Tensor::zeros({d}));
    for (std::size_t step = 0; step < inputs.size(); ++step) {
      const std::size_t pos = reversed ? inputs.size() - 1 - step : step;
      Graph::Var z = g.concat({inputs[pos], h});
      Graph::Var gate_i = g.sigmoid(g.add(g.matmul(g.param(cell.w_input), z),
                                          g.param(cell.b_input)));
      Graph::Var gate_f = g.sigmoid(g.add(g.matmul(g.param(cell.w_forget), z),
                                          g.param(cell.b_forget)));
      Graph::Var gate_o = g.sigmoid(g.add(g.matmul(g.param(cell.w_output), z),
                                          g.param(cell.b_output)));
      Graph::Var cand = g.tanh(g.add(g.matmul(g.param(cell.w_cand), z),
                                     g.param(cell.b_cand)));
      c = g.add(g.mul(gate_f, c), g.mul(gate_i, cand));
      h = g.mul(gate_o, g.tanh(c));
      states[pos] = h;
    }
    return states;
  }

  // Bi-LSTM over one part; hidden states are fwd ++ bwd concatenations with
  // dropout applied in train mode.
  std::vector<Graph::Var> encode_part(BiLstm& enc, const std::vector<Graph::Var>& inputs) {
    std::vector<Graph::Var> fwd = lstm_sweep(enc.fwd, inputs, false);
    std::vector<Graph::Var> bwd = lstm_sweep(enc.bwd, inputs, true);
    std::vector<Graph::Var> states;
    states.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      states.push_back(maybe_dropout(g.concat({fwd[i], bwd[i]})));
    }
    return states;
  }

  Graph::Var attend(const std::vector<Graph::Var>& states, Graph::Var query, Bilinear& att,
                    Tensor* alpha_out) {
    return model::attend(g, states, query, att, alpha_out);
  }
};

}  // namespace

Graph::Var attend(Graph& g, const std::vector<Graph::Var>& states, Graph::Var query,
                  Bilinear& att, Tensor* alpha_out) {
  if (states.empty()) throw std::invalid_argument("attend over an empty state list");
  Graph::Var wq = g.matmul(g.param(att.w), query);
  std::vector<Graph::Var> scores;
  scores.reserve(states.size());
  for (Graph::Var h : states) {
    scores.push_back(g.tanh(g.add(g.dot(h, wq), g.param(att.b))));
  }
  Graph::Var alpha = g.softmax(g.concat(scores));
  if (alpha_out) *alpha_out = g.value(alpha);
  return g.weighted_sum(alpha, states);
}

ForwardPass run_forward(const corpus::OpinionInstance& instance,
                        const corpus::EmbeddingTable& table, ModelParams& params,
                        const HyperParams& hp, Mode mode, Rng* dropout_rng) {
  if (instance.target.empty()) {
    throw std::invalid_argument("instance " + instance.opinion_id() + " has an empty target");
  }
  if (mode == Mode::Train && hp.dropout_rate > 0.0 && dropout_rng == nullptr) {
    throw std::invalid_argument("train mode with dropout requires a dropout rng");
  }

  ForwardPass fp;
  Graph& g = fp.graph;
  Builder b{g, params, hp, mode, dropout_rng};
  const std::size_t d2 = 2 * params.hidden;

  auto embed_part = [&](const std::vector<corpus::Token>& tokens) {
    std::vector<Graph::Var> vars;
    vars.reserve(tokens.size());
    for (const corpus::Token& t : tokens) {
      vars.push_back(g.input(Tensor::vector(table.lookup(t.lemma))));
    }
    return vars;
  };

  std::vector<Graph::Var> e_left = embed_part(instance.left);
  std::vector<Graph::Var> e_target = embed_part(instance.target);
  std::vector<Graph::Var> e_right = embed_part(instance.right);

  std::vector<Graph::Var> h_left = b.encode_part(params.left, e_left);
  std::vector<Graph::Var> h_target = b.encode_part(params.target, e_target);
  std::vector<Graph::Var> h_right = b.encode_part(params.right, e_right);

  ForwardTrace& trace = fp.trace;
  for (Graph::Var h : h_left) trace.hidden_left.push_back(g.value(h));
  for (Graph::Var h : h_target) trace.hidden_target.push_back(g.value(h));
  for (Graph::Var h : h_right) trace.hidden_right.push_back(g.value(h));

  Graph::Var target_pool = g.mean_pool(h_target);
  trace.target_pool = g.value(target_pool);

  const Tensor empty_alpha({0}, {});
  Graph::Var zero_repr = g.input(Tensor::zeros({d2}));

  // The rotatory loop. Hop 1 queries the contexts with the pooled target;
  // later hops feed the previous hop's side-aware target representations
  // back into the context attentions.
  Graph::Var repr_left{0}, repr_right{0};
  Graph::Var repr_tgt_left = target_pool;
  Graph::Var repr_tgt_right = target_pool;
  for (std::size_t hop = 0; hop < hp.hops; ++hop) {
    ForwardTrace::Hop th;

    if (h_left.empty()) {
      repr_left = zero_repr;
      th.alpha_left = empty_alpha;
      th.repr_left = g.value(zero_repr);
    } else {
      repr_left = b.attend(h_left, repr_tgt_left, params.ctx_left, &th.alpha_left);
      th.repr_left = g.value(repr_left);
    }
    if (h_right.empty()) {
      repr_right = zero_repr;
      th.alpha_right = empty_alpha;
      th.repr_right = g.value(zero_repr);
    } else {
      repr_right = b.attend(h_right, repr_tgt_right, params.ctx_right, &th.alpha_right);
      th.repr_right = g.value(repr_right);
    }

    repr_tgt_left = b.attend(h_target, repr_left, params.tgt_left, &th.alpha_target_left);
    th.repr_target_left = g.value(repr_tgt_left);
    repr_tgt_right = b.attend(h_target, repr_right, params.tgt_right, &th.alpha_target_right);
    th.repr_target_right = g.value(repr_tgt_right);

    trace.hops.push_back(std::move(th));
  }

  Graph::Var sentence = g.concat({repr_left, repr_tgt_left, repr_tgt_right, repr_right});
  trace.sentence = g.value(sentence);
  if (hp.dropout_sentence) sentence = b.maybe_dropout(sentence);

  fp.logits = g.add(g.matmul(g.param(params.w_out), sentence), g.param(params.b_out));
  trace.logits = g.value(fp.logits);
  trace.probabilities = Tensor::vector(num::softmax_values(trace.logits.values));
  trace.predicted = num::argmax_lowest(trace.probabilities.values);

  for (Parameter* p : params.all()) fp.param_vars.push_back(g.param(*p));
  return fp;
}

ForwardTrace forward_eval(const corpus::OpinionInstance& instance,
                          const corpus::EmbeddingTable& table, ModelParams& params,
                          const HyperParams& hp) {
  ForwardPass fp = run_forward(instance, table, params, hp, Mode::Eval, nullptr);
  return std::move(fp.trace);
}

}  // namespace lcrprobe::model
