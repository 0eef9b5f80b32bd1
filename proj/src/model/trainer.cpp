#include "lcrprobe/model/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lcrprobe/util.hpp"

namespace lcrprobe::model {

using num::Graph;
using num::Parameter;

namespace {

double l2_penalty(const std::vector<Parameter*>& weights, double lambda) {
  double sq = 0.0;
  for (const Parameter* p : weights) {
    for (double v : p->value.values) sq += v * v;
  }
  return lambda * sq;
}

}  // namespace

TrainResult train(const std::vector<corpus::OpinionInstance>& instances,
                  const corpus::EmbeddingTable& table, ModelParams& params,
                  const HyperParams& hp, const num::RandomStreams& streams,
                  std::ostream* progress) {
  if (instances.empty()) throw std::invalid_argument("training set is empty");
  hp.validate();

  num::Rng shuffle_rng = streams.stream("shuffle");
  num::Rng dropout_rng = streams.stream("dropout");

  std::vector<Parameter*> all_params = params.all();
  std::vector<Parameter*> weight_params = params.weights();

  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t step_count = 0;
    std::size_t hits = 0;

    for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
      const std::size_t end = std::min(order.size(), start + hp.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - start);

      double data_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const corpus::OpinionInstance& inst = instances[order[k]];
        ForwardPass fp = run_forward(inst, table, params, hp, Mode::Train, &dropout_rng);
        const std::size_t gold = static_cast<std::size_t>(inst.polarity);
        Graph::Var loss = fp.graph.cross_entropy_l2(fp.logits, gold, {}, 0.0);
        data_loss += fp.graph.value(loss)[0] * inv_batch;
        if (fp.trace.predicted == gold) ++hits;
        fp.graph.backward(loss);
        fp.graph.flush_param_grads(inv_batch);
      }

      // L2 applied once per step over weights; d(lambda*||w||^2)/dw = 2*lambda*w.
      const double penalty = l2_penalty(weight_params, hp.l2_lambda);
      if (hp.l2_lambda > 0.0) {
        for (Parameter* p : weight_params) {
          for (std::size_t i = 0; i < p->value.numel(); ++i) {
            p->grad[i] += 2.0 * hp.l2_lambda * p->value[i];
          }
        }
      }
      const double step_loss = data_loss + penalty;
      if (!std::isfinite(step_loss)) {
        throw std::runtime_error("training diverged (loss not finite) at epoch " +
                                 std::to_string(epoch));
      }
      loss_sum += step_loss;
      ++step_count;

      num::sgd_momentum_step(all_params, hp.learning_rate, hp.momentum);
    }

    EpochLog log;
    log.epoch = epoch;
    log.mean_loss = loss_sum / static_cast<double>(step_count);
    log.train_acc = static_cast<double>(hits) / static_cast<double>(instances.size());
    result.log.push_back(log);
    if (progress) {
      *progress << "epoch " << epoch << "/" << hp.epochs << " loss " << log.mean_loss
                << " acc " << log.train_acc << "\n";
    }
  }
  return result;
}

EvalReport evaluate(const std::vector<corpus::OpinionInstance>& instances,
                    const corpus::EmbeddingTable& table, ModelParams& params,
                    const HyperParams& hp) {
  EvalReport report;
  for (const corpus::OpinionInstance& inst : instances) {
    ForwardTrace trace = forward_eval(inst, table, params, hp);
    const std::size_t gold = static_cast<std::size_t>(inst.polarity);
    report.per_class[gold].frequency++;
    report.overall.frequency++;
    if (trace.predicted == gold) {
      report.per_class[gold].correct++;
      report.overall.correct++;
    }
  }
  return report;
}

std::string format_accuracy_table(const EvalReport& train, const EvalReport* test) {
  static const char* kRows[] = {"Positive", "Neutral", "Negative"};
  std::ostringstream out;
  char buf[128];
  if (test) {
    out << "            Training set        Test set\n";
    out << "            Freq.   acc.(%)     Freq.   acc.(%)\n";
  } else {
    out << "            Training set\n";
    out << "            Freq.   acc.(%)\n";
  }
  auto row = [&](const char* name, const ClassStats& a, const ClassStats* b) {
    if (b) {
      std::snprintf(buf, sizeof(buf), "%-10s %6zu %9.1f    %6zu %9.1f\n", name, a.frequency,
                    100.0 * a.accuracy(), b->frequency, 100.0 * b->accuracy());
    } else {
      std::snprintf(buf, sizeof(buf), "%-10s %6zu %9.1f\n", name, a.frequency,
                    100.0 * a.accuracy());
    }
    out << buf;
  };
  for (std::size_t c = 0; c < kClassCount; ++c) {
    row(kRows[c], train.per_class[c], test ? &test->per_class[c] : nullptr);
  }
  row("Overall", train.overall, test ? &test->overall : nullptr);
  return out.str();
}

std::string format_training_log_csv(const TrainResult& result) {
  std::string out = "epoch,mean_loss,train_acc\n";
  for (const EpochLog& log : result.log) {
    out += std::to_string(log.epoch) + "," + util::format_double(log.mean_loss) + "," +
           util::format_double(log.train_acc) + "\n";
  }
  return out;
}

}  // namespace lcrprobe::model
