#include "lcrprobe/numerics/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace lcrprobe::num {

namespace {

[[noreturn]] void shape_error(const std::string& op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(op + ": incompatible shapes " + a.shape_str() + " and " +
                              b.shape_str());
}

}  // namespace

Graph::Var Graph::emplace(Tensor value, std::function<void(Graph&)> backward) {
  Node node;
  node.grad = Tensor::zeros(value.shape);
  node.value = std::move(value);
  node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Graph::Var Graph::input(Tensor value) { return emplace(std::move(value), nullptr); }

Graph::Var Graph::param(Parameter& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return Var{it->second};
  Var v = emplace(p.value, nullptr);
  nodes_[v.id].bound = &p;
  param_nodes_.emplace(&p, v.id);
  return v;
}

Graph::Var Graph::matmul(Var a, Var b) {
  const Tensor& ta = nodes_[a.id].value;
  const Tensor& tb = nodes_[b.id].value;

  const bool a_vec = ta.is_vector();
  const bool b_vec = tb.is_vector();
  if (!(ta.is_matrix() || a_vec) || !(tb.is_matrix() || b_vec)) {
    shape_error("matmul", ta, tb);
  }
  const std::size_t m = a_vec ? 1 : ta.rows();
  const std::size_t k = a_vec ? ta.shape[0] : ta.cols();
  const std::size_t kb = b_vec ? tb.shape[0] : tb.rows();
  const std::size_t n = b_vec ? 1 : tb.cols();
  if (k != kb) shape_error("matmul", ta, tb);

  std::vector<std::size_t> out_shape;
  if (a_vec && b_vec) {
    out_shape = {1};
  } else if (a_vec) {
    out_shape = {n};
  } else if (b_vec) {
    out_shape = {m};
  } else {
    out_shape = {m, n};
  }

  Tensor out = Tensor::zeros(out_shape);
  // C = A * B in ikj order; all three walks are sequential in memory.
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = ta.values.data() + i * k;
    double* crow = out.values.data() + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const double av = arow[l];
      if (av == 0.0) continue;
      const double* brow = tb.values.data() + l * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }

  Var result = emplace(std::move(out), nullptr);
  nodes_[result.id].backward = [a, b, result, m, k, n](Graph& g) {
    const Tensor& ta = g.nodes_[a.id].value;
    const Tensor& tb = g.nodes_[b.id].value;
    const Tensor& gc = g.nodes_[result.id].grad;
    Tensor& ga = g.grad_mut(a);
    Tensor& gb = g.grad_mut(b);
    // dA = dC * B^T : dA[i][l] = sum_j dC[i][j] * B[l][j]
    for (std::size_t i = 0; i < m; ++i) {
      const double* gcrow = gc.values.data() + i * n;
      double* garow = ga.values.data() + i * k;
      for (std::size_t l = 0; l < k; ++l) {
        const double* brow = tb.values.data() + l * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += gcrow[j] * brow[j];
        garow[l] += acc;
      }
    }
    // dB = A^T * dC : dB[l][j] += A[i][l] * dC[i][j]
    for (std::size_t i = 0; i < m; ++i) {
      const double* arow = ta.values.data() + i * k;
      const double* gcrow = gc.values.data() + i * n;
      for (std::size_t l = 0; l < k; ++l) {
        const double av = arow[l];
        if (av == 0.0) continue;
        double* gbrow = gb.values.data() + l * n;
        for (std::size_t j = 0; j < n; ++j) gbrow[j] += av * gcrow[j];
      }
    }
  };
  return result;
}

Graph::Var Graph::add(Var a, Var b) {
  const Tensor& ta = nodes_[a.id].value;
  const Tensor& tb = nodes_[b.id].value;
  Tensor out;
  if (ta.same_shape(tb)) {
    out = ta;
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] += tb[i];
  } else if (tb.is_scalar()) {
    out = ta;
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] += tb[0];
  } else if (ta.is_scalar()) {
    out = tb;
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] += ta[0];
  } else {
    shape_error("add", ta, tb);
  }
  Var result = emplace(std::move(out), nullptr);
  nodes_[result.id].backward = [a, b, result](Graph& g) {
    const Tensor& go = g.nodes_[result.id].grad;
    Tensor& ga = g.grad_mut(a);
    Tensor& gb = g.grad_mut(b);
    if (ga.numel() == go.numel()) {
      for (std::size_t i = 0; i < go.numel(); ++i) ga[i] += go[i];
    } else {
      for (std::size_t i = 0; i < go.numel(); ++i) ga[0] += go[i];
    }
    if (gb.numel() == go.numel()) {
      for (std::size_t i = 0; i < go.numel(); ++i) gb[i] += go[i];
    } else {
      for (std::size_t i = 0; i < go.numel(); ++i) gb[0] += go[i];
    }
  };
  return result;
}

Graph::Var Graph::add_rows(Var m, Var row) {
  const Tensor& tm = nodes_[m.id].value;
  const Tensor& tr = nodes_[row.id].value;
  if (!tm.is_matrix() || !tr.is_vector() || tm.cols() != tr.shape[0]) {
    shape_error("add_rows", tm, tr);
  }
  const std::size_t r = tm.rows();
  const std::size_t c = tm.cols();
  Tensor out = tm;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out.values[i * c + j] += tr[j];
  }
  Var result = emplace(std::move(out), nullptr);
  nodes_[result.id].backward = [m, row, result, r, c](Graph& g) {
    const Tensor& go = g.nodes_[result.id].grad;
    Tensor& gm = g.grad_mut(m);
    Tensor& gr = g.grad_mut(row);
    for (std::size_t i = 0; i < r * c; ++i) gm[i] += go[i];
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) gr[j] += go[i * c + j];
    }
  };
  return result;
}

Graph::Var Graph::mul(Var a, Var b) {
  const Tensor& ta = nodes_[a.id].value;
  const Tensor& tb = nodes_[b.id].value;
  if (!ta.same_shape(tb)) shape_error("mul", ta, tb);
  Tensor out = ta;
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= tb[i];
  Var result = emplace(std::move(out), nullptr);
  nodes_[result.id].backward = [a, b, result](Graph& g) {
    const Tensor& go = g.nodes_[result.id].grad;
    const Tensor& ta = g.nodes_[a.id].value;
    const Tensor& tb = g.nodes_[b.id].value;
    Tensor& ga = g.grad_mut(a);
    Tensor& gb = g.grad_mut(b);
    for (std::size_t i = 0; i < go.numel(); ++i) {
      ga[i] += go[i] * tb[i];
      gb[i] += go[i] * ta[i];
    }
  };
  return result;
}

Graph::Var Graph::pointwise(Pointwise op, Var x) {
  const Tensor& tx = nodes_[x.id].value;
  Tensor out = tx;
  switch (op) {
    case Pointwise::Tanh:
      for (double& v : out.values) v = std::tanh(v);
      break;
    case Pointwise::Sigmoid:
      for (double& v : out.values) v = 1.0 / (1.0 + std::exp(-v));
      break;
    case Pointwise::Relu:
      for (double& v : out.values) v = v > 0.0 ? v : 0.0;
      break;
  }
  Var result = emplace(std::move(out), nullptr);
  nodes_[result.id].backward = [op, x, result](Graph& g) {
    const Tensor& go = g.nodes_[result.id].grad;
    const Tensor& to = g.nodes_[result.id].value;
    const Tensor& tx = g.nodes_[x.id].value;
    Tensor& gx = g.grad_mut(x);
    switch (op) {
      case Pointwise::Tanh:
        for (std::size_t i = 0; i < go.numel(); ++i) gx[i] += go[i] * (1.0 - to[i] * to[i]);
        break;
      case Pointwise::Sigmoid:
        for (std::size_t i = 0; i < go.numel(); ++i) gx[i] += go[i] * to[i] * (1.0 - to[i]);
        break;
      case Pointwise::Relu:
        for (std::size_t i = 0; i < go.numel(); ++i) gx[i] += tx[i] > 0.0 ? go[i] : 0.0;
        break;
    }
  };
  return result;
}

Graph::Var Graph::softmax(Var x) {
  const Tensor& tx = nodes_[x.id].value;
  if (!tx.is_vector() || tx.numel() == 0) {
    throw std::invalid_argument("softmax requires a non-empty vector, got " + tx.shape_str());
  }
  Tensor out = Tensor::vector(softmax_values(tx.values));
  Var result = emplace(std::move(out), nullptr);
  nodes_[result.id].backward = [x, result](Graph& g) {
    const Tensor& go = g.nodes_[result.id].grad;
    const Tensor& s = g.nodes_[result.id].value;
    Tensor& gx = g.grad_mut(x);
    // dx_i = s_i * (go_i - sum_j go_j s_j)
    double dotp = 0.0;
    for (std::size_t j = 0; j < s.numel(); ++j) dotp += go[j] * s[j];
    for (std::size_t i = 0; i < s.numel(); ++i) gx[i] += s[i] * (go[i] - dotp);
  };
  return result;
}

Graph::Var Graph::concat(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat of empty list");
  std::size_t total = 0;
  for (Var p : parts) {
    const Tensor& t = nodes_[p.id].value;
    if (!t.is_vector()) {
      throw std::invalid_argument("concat requires vectors, got " + t.shape_str());
    }
    total += t.numel();
  }
  Tensor out = Tensor::zeros({total});
  std::size_t off = 0;
  for (Var p : parts) {
    const Tensor& t = nodes_[p.id].value;
    for (std::size_t i = 0; i < t.numel(); ++i) out[off + i] = t[i];
    off += t.numel();
  }
  Var result = emplace(std::move(out), nullptr);
  std::vector<Var> parts_copy = parts;
  nodes_[result.id].backward = [parts_copy, result](Graph& g) {
    const Tensor& go = g.nodes_[result.id].grad;
    std::size_t off = 0;
    for (Var p : parts_copy) {
      Tensor& gp = g.grad_mut(p);
      for (std::size_t i = 0; i < gp.numel(); ++i) gp[i] += go[off + i];
      off += gp.numel();
    }
  };
  return result;
}

Graph::Var Graph::mean_pool(const std::vector<Var>& rows) {
  if (rows.empty()) throw std::invalid_argument("mean_pool of empty list");
  const std::size_t dim = nodes_[rows[0].id].value.numel();
  for (Var r : rows) {
    const Tensor& t = nodes_[r.id].value;
    if (!t.is_vector() || t.numel() != dim) {
      throw std::invalid_argument("mean_pool requires equal-length vectors");
    }
  }
  Tensor out = Tensor::zeros({dim});
  for (Var r : rows) {
    const Tensor& t = nodes_[r.id].value;
    for (std::size_t i = 0; i < dim; ++i) out[i] += t[i];
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& v : out.values) v *= inv;
  Var result = emplace(std::move(out), nullptr);
  std::vector<Var> rows_copy = rows;
  nodes_[result.id].backward = [rows_copy, result, inv](Graph& g) {
    const Tensor& go = g.nodes_[result.id].grad;
    for (Var r : rows_copy) {
      Tensor& gr = g.grad_mut(r);
      for (std::size_t i = 0; i < gr.numel(); ++i) gr[i] += go[i] * inv;
    }
  };
  return result;
}

Graph::Var Graph::weighted_sum(Var weights, const std::vector<Var>& rows) {
  const Tensor& tw = nodes_[weights.id].value;
  if (!tw.is_vector() || tw.numel() != rows.size()) {
    throw std::invalid_argument("weighted_sum: " + std::to_string(rows.size()) +
                                " rows but weight shape " + tw.shape_str());
  }
  if (rows.empty()) throw std::invalid_argument("weighted_sum of empty list");
  const std::size_t dim = nodes_[rows[0].id].value.numel();
  Tensor out = Tensor::zeros({dim});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Tensor& t = nodes_[rows[r].id].value;
    if (!t.is_vector() || t.numel() != dim) {
      throw std::invalid_argument("weighted_sum requires equal-length vectors");
    }
    for (std::size_t i = 0; i < dim; ++i) out[i] += tw[r] * t[i];
  }
  Var result = emplace(std::move(out), nullptr);
  std::vector<Var> rows_copy = rows;
  nodes_[result.id].backward = [weights, rows_copy, result](Graph& g) {
    const Tensor& go = g.nodes_[result.id].grad;
    const Tensor& tw = g.nodes_[weights.id].value;
    Tensor& gw = g.grad_mut(weights);
    for (std::size_t r = 0; r < rows_copy.size(); ++r) {
      const Tensor& t = g.nodes_[rows_copy[r].id].value;
      Tensor& gr = g.grad_mut(rows_copy[r]);
      double acc = 0.0;
      for (std::size_t i = 0; i < go.numel(); ++i) {
        acc += go[i] * t[i];
        gr[i] += go[i] * tw[r];
      }
      gw[r] += acc;
    }
  };
  return result;
}

Graph::Var Graph::dot(Var a, Var b) {
  const Tensor& ta = nodes_[a.id].value;
  const Tensor& tb = nodes_[b.id].value;
  if (!ta.is_vector() || !tb.is_vector() || ta.numel() != tb.numel()) {
    shape_error("dot", ta, tb);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < ta.numel(); ++i) acc += ta[i] * tb[i];
  Var result = emplace(Tensor::scalar(acc), nullptr);
  nodes_[result.id].backward = [a, b, result](Graph& g) {
    const double go = g.nodes_[result.id].grad[0];
    const Tensor& ta = g.nodes_[a.id].value;
    const Tensor& tb = g.nodes_[b.id].value;
    Tensor& ga = g.grad_mut(a);
    Tensor& gb = g.grad_mut(b);
    for (std::size_t i = 0; i < ta.numel(); ++i) {
      ga[i] += go * tb[i];
      gb[i] += go * ta[i];
    }
  };
  return result;
}

Graph::Var Graph::dropout(Var x, double rate, bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
  const Tensor& tx = nodes_[x.id].value;
  if (!training || rate == 0.0) {
    // Identity pass-through node.
    Var result = emplace(tx, nullptr);
    nodes_[result.id].backward = [x, result](Graph& g) {
      const Tensor& go = g.nodes_[result.id].grad;
      Tensor& gx = g.grad_mut(x);
      for (std::size_t i = 0; i < go.numel(); ++i) gx[i] += go[i];
    };
    return result;
  }
  const double keep = 1.0 - rate;
  const double scale = 1.0 / keep;
  std::vector<double> mask(tx.numel());
  for (double& m : mask) m = rng.bernoulli(keep) ? scale : 0.0;
  Tensor out = tx;
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= mask[i];
  Var result = emplace(std::move(out), nullptr);
  nodes_[result.id].backward = [x, result, mask = std::move(mask)](Graph& g) {
    const Tensor& go = g.nodes_[result.id].grad;
    Tensor& gx = g.grad_mut(x);
    for (std::size_t i = 0; i < go.numel(); ++i) gx[i] += go[i] * mask[i];
  };
  return result;
}

Graph::Var Graph::cross_entropy_l2(Var scores, std::size_t gold, const std::vector<Var>& params,
                                   double lambda) {
  const Tensor& ts = nodes_[scores.id].value;
  if (!ts.is_vector() || ts.numel() == 0) {
    throw std::invalid_argument("cross_entropy_l2 requires a non-empty score vector");
  }
  if (gold >= ts.numel()) {
    throw std::invalid_argument("gold class " + std::to_string(gold) +
                                " out of range for " + std::to_string(ts.numel()) + " scores");
  }
  double m = ts[0];
  for (double v : ts.values) m = std::max(m, v);
  double lse = 0.0;
  for (double v : ts.values) lse += std::exp(v - m);
  lse = m + std::log(lse);
  double loss = lse - ts[gold];
  for (Var p : params) {
    const Tensor& tp = nodes_[p.id].value;
    double sq = 0.0;
    for (double v : tp.values) sq += v * v;
    loss += lambda * sq;
  }
  Var result = emplace(Tensor::scalar(loss), nullptr);
  std::vector<Var> params_copy = params;
  nodes_[result.id].backward = [scores, gold, params_copy, lambda, result](Graph& g) {
    const double go = g.nodes_[result.id].grad[0];
    const Tensor& ts = g.nodes_[scores.id].value;
    Tensor& gs = g.grad_mut(scores);
    std::vector<double> probs = softmax_values(ts.values);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      gs[i] += go * (probs[i] - (i == gold ? 1.0 : 0.0));
    }
    for (Var p : params_copy) {
      const Tensor& tp = g.nodes_[p.id].value;
      Tensor& gp = g.grad_mut(p);
      for (std::size_t i = 0; i < tp.numel(); ++i) gp[i] += go * 2.0 * lambda * tp[i];
    }
  };
  return result;
}

Graph::Var Graph::cross_entropy_rows(Var logits, const std::vector<std::size_t>& golds) {
  const Tensor& tl = nodes_[logits.id].value;
  if (!tl.is_matrix() || tl.rows() != golds.size()) {
    throw std::invalid_argument("cross_entropy_rows: logit shape " + tl.shape_str() +
                                " does not match " + std::to_string(golds.size()) + " labels");
  }
  const std::size_t r = tl.rows();
  const std::size_t c = tl.cols();
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    if (golds[i] >= c) {
      throw std::invalid_argument("gold class " + std::to_string(golds[i]) +
                                  " out of range for " + std::to_string(c) + " columns");
    }
    const double* row = tl.values.data() + i * c;
    double m = row[0];
    for (std::size_t j = 1; j < c; ++j) m = std::max(m, row[j]);
    double lse = 0.0;
    for (std::size_t j = 0; j < c; ++j) lse += std::exp(row[j] - m);
    total += m + std::log(lse) - row[golds[i]];
  }
  total /= static_cast<double>(r);
  Var result = emplace(Tensor::scalar(total), nullptr);
  std::vector<std::size_t> golds_copy = golds;
  nodes_[result.id].backward = [logits, golds_copy, result, r, c](Graph& g) {
    const double go = g.nodes_[result.id].grad[0];
    const Tensor& tl = g.nodes_[logits.id].value;
    Tensor& gl = g.grad_mut(logits);
    const double inv = 1.0 / static_cast<double>(r);
    for (std::size_t i = 0; i < r; ++i) {
      const double* row = tl.values.data() + i * c;
      std::vector<double> probs = softmax_values(std::vector<double>(row, row + c));
      double* grow = gl.values.data() + i * c;
      for (std::size_t j = 0; j < c; ++j) {
        grow[j] += go * inv * (probs[j] - (j == golds_copy[i] ? 1.0 : 0.0));
      }
    }
  };
  return result;
}

void Graph::backward(Var root) {
  Node& r = nodes_[root.id];
  if (!r.value.is_scalar()) {
    throw std::invalid_argument("backward root must be scalar, got " + r.value.shape_str());
  }
  for (Node& n : nodes_) n.grad.fill(0.0);
  r.grad[0] = 1.0;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    if (nodes_[i].backward) nodes_[i].backward(*this);
  }
}

void Graph::flush_param_grads(double scale) {
  for (auto& [param, id] : param_nodes_) {
    const Tensor& g = nodes_[id].grad;
    for (std::size_t i = 0; i < g.numel(); ++i) param->grad[i] += scale * g[i];
  }
}

Tensor init_uniform(std::vector<std::size_t> shape, double a, double b, Rng& rng) {
  if (!(a < b)) {
    throw std::invalid_argument("init_uniform requires a < b");
  }
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.values) v = rng.uniform(a, b);
  return t;
}

Tensor init_normal(std::vector<std::size_t> shape, double mean, double stddev, Rng& rng) {
  if (!(stddev > 0.0)) {
    throw std::invalid_argument("init_normal requires stddev > 0");
  }
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.values) v = rng.normal(mean, stddev);
  return t;
}

void sgd_momentum_step(const std::vector<Parameter*>& params, double lr, double mu) {
  for (Parameter* p : params) {
    for (std::size_t i = 0; i < p->value.numel(); ++i) {
      p->velocity[i] = mu * p->velocity[i] - lr * p->grad[i];
      p->value[i] += p->velocity[i];
    }
    p->zero_grad();
  }
}

}  // namespace lcrprobe::num
