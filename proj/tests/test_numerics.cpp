#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fd_check.hpp"
#include "lcrprobe/numerics/graph.hpp"
#include "lcrprobe/numerics/rng.hpp"
#include "lcrprobe/numerics/tensor.hpp"

using namespace lcrprobe::num;
using fdcheck::fd_gradient;
using fdcheck::max_rel_err;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.values) v = rng.uniform(-1.5, 1.5);
  return t;
}

std::vector<double> to_vec(const Tensor& t) { return t.values; }

}  // namespace

TEST_CASE("matmul products") {
  Graph g;
  auto a = g.input(Tensor::matrix(2, 2, {1, 0, 0, 1}));
  auto b = g.input(Tensor::matrix(2, 1, {3, 4}));
  auto c = g.matmul(a, b);
  CHECK(g.value(c).values == std::vector<double>{3, 4});

  auto d = g.matmul(g.input(Tensor::matrix(1, 1, {2})), g.input(Tensor::matrix(1, 1, {5})));
  CHECK(g.value(d).values == std::vector<double>{10});
}

TEST_CASE("matmul shape mismatch names both shapes") {
  Graph g;
  auto a = g.input(Tensor::matrix(2, 3, std::vector<double>(6, 1.0)));
  auto b = g.input(Tensor::matrix(2, 2, std::vector<double>(4, 1.0)));
  CHECK_THROWS_WITH_AS(g.matmul(a, b), doctest::Contains("[2x3]"), std::invalid_argument);
}

TEST_CASE("matmul gradient of sum matches finite differences") {
  Rng rng(7);
  Tensor a = random_tensor({3, 4}, rng);
  Tensor b = random_tensor({4, 2}, rng);

  auto loss = [](const std::vector<Tensor>& in) {
    Graph g;
    auto c = g.matmul(g.input(in[0]), g.input(in[1]));
    auto s = g.dot(g.matmul(g.input(Tensor::vector({1, 1, 1})), c),
                   g.input(Tensor::vector({1, 1})));
    return g.value(s)[0];
  };

  Graph g;
  auto va = g.input(a);
  auto vb = g.input(b);
  auto c = g.matmul(va, vb);
  auto s = g.dot(g.matmul(g.input(Tensor::vector({1, 1, 1})), c), g.input(Tensor::vector({1, 1})));
  g.backward(s);

  CHECK(max_rel_err(to_vec(g.grad(va)), fd_gradient(loss, {a, b}, 0)) < 1e-6);
  CHECK(max_rel_err(to_vec(g.grad(vb)), fd_gradient(loss, {a, b}, 1)) < 1e-6);

  // d(sum C)/dA_il is the l-th column sum of B.
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t l = 0; l < 4; ++l) {
      double colsum = b.at(l, 0) + b.at(l, 1);
      CHECK(g.grad(va).at(i, l) == doctest::Approx(colsum).epsilon(1e-12));
    }
  }
}

TEST_CASE("pointwise values") {
  Graph g;
  auto t = g.tanh(g.input(Tensor::scalar(0.0)));
  CHECK(g.value(t)[0] == 0.0);
  auto r = g.relu(g.input(Tensor::vector({-3.5, 2.0})));
  CHECK(g.value(r).values == std::vector<double>{0.0, 2.0});
  auto s = g.sigmoid(g.input(Tensor::scalar(0.0)));
  CHECK(g.value(s)[0] == 0.5);
}

TEST_CASE("softmax examples and properties") {
  Graph g;
  auto a = g.softmax(g.input(Tensor::vector({0, 0})));
  CHECK(g.value(a).values == std::vector<double>{0.5, 0.5});

  auto b = g.softmax(g.input(Tensor::vector({1000, 1000, 1000})));
  for (double v : g.value(b).values) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-12));

  auto c = g.softmax(g.input(Tensor::vector({std::log(1.0), std::log(3.0)})));
  CHECK(g.value(c)[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(g.value(c)[1] == doctest::Approx(0.75).epsilon(1e-12));

  CHECK_THROWS_AS(g.softmax(g.input(Tensor({0}, {}))), std::invalid_argument);

  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    std::size_t n = 1 + rng.below(8);
    Tensor x = random_tensor({n}, rng);
    Graph h;
    auto sm = h.softmax(h.input(x));
    double sum = 0.0;
    for (double v : h.value(sm).values) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::fabs(sum - 1.0) < 1e-9);

    // Shift invariance.
    Tensor shifted = x;
    for (double& v : shifted.values) v += 17.25;
    auto sm2 = h.softmax(h.input(shifted));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::fabs(h.value(sm)[i] - h.value(sm2)[i]) < 1e-9);
    }
  }
}

TEST_CASE("concat values and gradient routing") {
  Graph g;
  auto c = g.concat({g.input(Tensor::vector({1, 2})), g.input(Tensor::vector({3}))});
  CHECK(g.value(c).values == std::vector<double>{1, 2, 3});

  auto single = g.concat({g.input(Tensor::vector({4, 5}))});
  CHECK(g.value(single).values == std::vector<double>{4, 5});

  CHECK_THROWS_AS(g.concat({}), std::invalid_argument);

  // d(sum)/d(part2) = ones of part2's shape.
  Graph h;
  auto p1 = h.input(Tensor::vector({1, 2}));
  auto p2 = h.input(Tensor::vector({3, 4, 5}));
  auto cc = h.concat({p1, p2});
  auto s = h.dot(cc, h.input(Tensor::vector({1, 1, 1, 1, 1})));
  h.backward(s);
  CHECK(h.grad(p2).values == std::vector<double>{1, 1, 1});
}

TEST_CASE("mean_pool values and gradient") {
  Graph g;
  auto one = g.mean_pool({g.input(Tensor::vector({2, 4}))});
  CHECK(g.value(one).values == std::vector<double>{2, 4});

  auto r1 = g.input(Tensor::vector({0, 0}));
  auto r2 = g.input(Tensor::vector({2, 2}));
  auto m = g.mean_pool({r1, r2});
  CHECK(g.value(m).values == std::vector<double>{1, 1});

  auto s = g.dot(m, g.input(Tensor::vector({1, 1})));
  g.backward(s);
  CHECK(g.grad(r1).values == std::vector<double>{0.5, 0.5});
  CHECK(g.grad(r2).values == std::vector<double>{0.5, 0.5});

  CHECK_THROWS_AS(g.mean_pool({}), std::invalid_argument);
}

TEST_CASE("dropout identity modes") {
  Rng rng(3);
  Graph g;
  Tensor x = Tensor::vector({1.5, -2.0, 0.25});
  auto a = g.dropout(g.input(x), 0.0, true, rng);
  CHECK(g.value(a).values == x.values);
  auto b = g.dropout(g.input(x), 0.5, false, rng);
  CHECK(g.value(b).values == x.values);
  CHECK_THROWS_AS(g.dropout(g.input(x), 1.0, true, rng), std::invalid_argument);
  CHECK_THROWS_AS(g.dropout(g.input(x), -0.1, true, rng), std::invalid_argument);
}

TEST_CASE("dropout is unbiased over many draws") {
  Rng rng(42);
  Tensor x = Tensor::vector({2.0, -3.0});
  std::vector<double> mean(2, 0.0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    Graph g;
    auto d = g.dropout(g.input(x), 0.5, true, rng);
    mean[0] += g.value(d)[0];
    mean[1] += g.value(d)[1];
  }
  CHECK(mean[0] / draws == doctest::Approx(2.0).epsilon(0.05));
  CHECK(mean[1] / draws == doctest::Approx(-3.0).epsilon(0.05));
}

TEST_CASE("cross entropy examples") {
  Graph g;
  auto uniform = g.cross_entropy_l2(g.input(Tensor::vector({0, 0, 0})), 0, {}, 0.0);
  CHECK(g.value(uniform)[0] == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  auto confident = g.cross_entropy_l2(g.input(Tensor::vector({10, -10, -10})), 0, {}, 0.0);
  CHECK(g.value(confident)[0] < 1e-4);

  // Data loss isolated to zero: singleton logit has probability one.
  auto p = g.input(Tensor::vector({2.0}));
  auto penalty = g.cross_entropy_l2(g.input(Tensor::vector({0.0})), 0, {p}, 0.5);
  CHECK(g.value(penalty)[0] == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(g.cross_entropy_l2(g.input(Tensor::vector({0, 0})), 2, {}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("cross entropy rows matches the vector op") {
  Rng rng(5);
  Tensor logits = random_tensor({4, 3}, rng);
  std::vector<std::size_t> golds = {2, 0, 1, 1};

  Graph g;
  auto batched = g.cross_entropy_rows(g.input(logits), golds);

  double expect = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    Graph h;
    std::vector<double> row(logits.values.begin() + i * 3, logits.values.begin() + (i + 1) * 3);
    auto l = h.cross_entropy_l2(h.input(Tensor::vector(row)), golds[i], {}, 0.0);
    expect += h.value(l)[0];
  }
  CHECK(g.value(batched)[0] == doctest::Approx(expect / 4.0).epsilon(1e-12));
}

TEST_CASE("sgd momentum recurrence") {
  // First step reduces to plain SGD.
  Parameter p("p", Tensor::vector({1.0, 2.0}));
  p.grad = Tensor::vector({0.5, -0.5});
  sgd_momentum_step({&p}, 0.1, 0.9);
  CHECK(p.value.values == std::vector<double>{1.0 - 0.05, 2.0 + 0.05});
  CHECK(p.grad.values == std::vector<double>{0, 0});

  // Zero gradient: value moves by mu * velocity.
  Parameter q("q", Tensor::vector({0.0}));
  q.velocity = Tensor::vector({1.0});
  sgd_momentum_step({&q}, 0.1, 0.9);
  CHECK(q.value[0] == doctest::Approx(0.9).epsilon(1e-15));

  // Hand-unrolled: constant grad 1, lr 0.1, mu 0.9 gives steps -0.1 then -0.19.
  Parameter r("r", Tensor::vector({0.0}));
  r.grad = Tensor::vector({1.0});
  sgd_momentum_step({&r}, 0.1, 0.9);
  CHECK(r.value[0] == doctest::Approx(-0.1).epsilon(1e-15));
  r.grad = Tensor::vector({1.0});
  sgd_momentum_step({&r}, 0.1, 0.9);
  CHECK(r.value[0] == doctest::Approx(-0.29).epsilon(1e-12));
}

TEST_CASE("initializers") {
  CHECK(Tensor::zeros({3}).values == std::vector<double>{0, 0, 0});

  Rng rng(123);
  Tensor u = init_uniform({100000}, -0.1, 0.1, rng);
  double mean = 0.0;
  for (double v : u.values) {
    CHECK(v > -0.1);
    CHECK(v < 0.1);
    mean += v;
  }
  mean /= static_cast<double>(u.numel());
  CHECK(std::fabs(mean) < 0.002);

  Tensor n = init_normal({100000}, 0.0, 0.052, rng);
  double m2 = 0.0, m1 = 0.0;
  for (double v : n.values) {
    m1 += v;
    m2 += v * v;
  }
  m1 /= static_cast<double>(n.numel());
  double stddev = std::sqrt(m2 / static_cast<double>(n.numel()) - m1 * m1);
  CHECK(stddev == doctest::Approx(0.052).epsilon(0.03));

  CHECK_THROWS_AS(init_uniform({2}, 0.5, 0.5, rng), std::invalid_argument);
  CHECK_THROWS_AS(init_normal({2}, 0.0, 0.0, rng), std::invalid_argument);
}

TEST_CASE("same seed gives bit-identical trajectories") {
  auto run = [] {
    RandomStreams streams(99);
    Rng init = streams.stream("init");
    Parameter w("w", init_uniform({4, 4}, -0.1, 0.1, init));
    Parameter b("b", Tensor::zeros({4}));
    Rng drop = streams.stream("dropout");
    for (int step = 0; step < 5; ++step) {
      Graph g;
      auto x = g.input(Tensor::vector({1.0, -1.0, 0.5, 0.25}));
      auto h = g.tanh(g.add(g.matmul(g.param(w), x), g.param(b)));
      auto hd = g.dropout(h, 0.5, true, drop);
      auto loss = g.cross_entropy_l2(hd, 1, {g.param(w)}, 1e-4);
      g.backward(loss);
      g.flush_param_grads(1.0);
      sgd_momentum_step({&w, &b}, 0.05, 0.9);
    }
    return std::make_pair(w.value.values, b.value.values);
  };
  auto first = run();
  auto second = run();
  CHECK(first.first == second.first);
  CHECK(first.second == second.second);
}

TEST_CASE("fan-out accumulates gradients additively") {
  // loss = dot(x, a) + dot(x, b): dx must be a + b.
  Graph g;
  auto x = g.input(Tensor::vector({1.0, 2.0}));
  auto a = g.input(Tensor::vector({3.0, 4.0}));
  auto b = g.input(Tensor::vector({5.0, 6.0}));
  auto loss = g.add(g.dot(x, a), g.dot(x, b));
  g.backward(loss);
  CHECK(g.grad(x).values == std::vector<double>{8.0, 10.0});
}

TEST_CASE("parameter reuse across ops accumulates") {
  // W used twice in the same graph: gradient contributions must add.
  Parameter w("w", Tensor::matrix(2, 2, {1, 2, 3, 4}));
  Graph g;
  auto wv = g.param(w);
  CHECK(g.param(w).id == wv.id);
  auto x = g.input(Tensor::vector({1.0, 1.0}));
  auto y1 = g.matmul(wv, x);
  auto y2 = g.matmul(wv, x);
  auto loss = g.dot(g.add(y1, y2), g.input(Tensor::vector({1.0, 1.0})));
  g.backward(loss);
  g.flush_param_grads(1.0);
  // d(loss)/dW_ij = 2 * x_j = 2 for every entry.
  for (double v : w.grad.values) CHECK(v == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("every op passes a finite-difference gradient check") {
  Rng rng(2024);
  const double tol = 1e-4;

  for (int rep = 0; rep < 5; ++rep) {
    std::size_t m = 1 + rng.below(8);
    std::size_t k = 1 + rng.below(8);
    std::size_t n = 1 + rng.below(8);

    // A composite touching matmul, add, add_rows, mul, pointwise, softmax,
    // concat, mean_pool, weighted_sum, dot and cross_entropy_l2.
    Tensor a = random_tensor({m, k}, rng);
    Tensor b = random_tensor({k, n}, rng);
    Tensor row = random_tensor({n}, rng);
    Tensor v1 = random_tensor({k}, rng);
    Tensor v2 = random_tensor({k}, rng);
    Tensor wts = random_tensor({2}, rng);

    auto build = [m, n](Graph& g, const std::vector<Tensor>& in) {
      auto a = g.input(in[0]);
      auto b = g.input(in[1]);
      auto row = g.input(in[2]);
      auto v1 = g.input(in[3]);
      auto v2 = g.input(in[4]);
      auto wts = g.input(in[5]);

      auto c = g.add_rows(g.matmul(a, b), row);            // m x n
      auto t = g.tanh(c);
      auto sg = g.sigmoid(c);
      auto prod = g.mul(t, sg);                            // m x n
      auto pooled = g.mean_pool({v1, v2});                 // k
      auto ws = g.weighted_sum(wts, {v1, v2});             // k
      auto d1 = g.dot(pooled, ws);
      auto reluv = g.relu(g.concat({d1, g.dot(v1, v2)}));  // 2
      auto sm = g.softmax(reluv);
      auto rowsum = g.matmul(g.input(Tensor::vector(std::vector<double>(m, 1.0))), prod);  // n
      auto scores = g.concat({g.dot(rowsum, row), g.dot(sm, g.input(Tensor::vector({1.0, 2.0})))});
      return g.cross_entropy_l2(scores, 1, {a}, 0.01);
    };

    auto loss_value = [&](const std::vector<Tensor>& in) {
      Graph g;
      return g.value(build(g, in))[0];
    };

    std::vector<Tensor> inputs = {a, b, row, v1, v2, wts};
    Graph g;
    std::vector<Graph::Var> vars;
    {
      // Rebuild with tracked vars for analytic gradients.
      auto av = g.input(inputs[0]);
      auto bv = g.input(inputs[1]);
      auto rowv = g.input(inputs[2]);
      auto v1v = g.input(inputs[3]);
      auto v2v = g.input(inputs[4]);
      auto wv = g.input(inputs[5]);
      vars = {av, bv, rowv, v1v, v2v, wv};

      auto c = g.add_rows(g.matmul(av, bv), rowv);
      auto t = g.tanh(c);
      auto sg = g.sigmoid(c);
      auto prod = g.mul(t, sg);
      auto pooled = g.mean_pool({v1v, v2v});
      auto ws = g.weighted_sum(wv, {v1v, v2v});
      auto d1 = g.dot(pooled, ws);
      auto reluv = g.relu(g.concat({d1, g.dot(v1v, v2v)}));
      auto sm = g.softmax(reluv);
      auto rowsum = g.matmul(g.input(Tensor::vector(std::vector<double>(m, 1.0))), prod);
      auto scores = g.concat({g.dot(rowsum, rowv), g.dot(sm, g.input(Tensor::vector({1.0, 2.0})))});
      auto loss = g.cross_entropy_l2(scores, 1, {av}, 0.01);
      g.backward(loss);
    }

    for (std::size_t which = 0; which < inputs.size(); ++which) {
      auto fd = fd_gradient(loss_value, inputs, which);
      CHECK(max_rel_err(to_vec(g.grad(vars[which])), fd) < tol);
    }
  }
}

TEST_CASE("dropout backward respects the recorded mask") {
  Rng rng(8);
  Tensor x = Tensor::vector({1.0, 1.0, 1.0, 1.0, 1.0, 1.0});
  Graph g;
  auto xv = g.input(x);
  auto d = g.dropout(xv, 0.5, true, rng);
  auto s = g.dot(d, g.input(Tensor::vector(std::vector<double>(6, 1.0))));
  g.backward(s);
  for (std::size_t i = 0; i < 6; ++i) {
    // Gradient entry equals the mask value (0 or 2).
    CHECK(g.grad(xv)[i] == g.value(d)[i]);
  }
}
