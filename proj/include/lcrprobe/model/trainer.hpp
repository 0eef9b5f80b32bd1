#ifndef LCRPROBE_MODEL_TRAINER_HPP
#define LCRPROBE_MODEL_TRAINER_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "lcrprobe/model/lcr_rot_hop.hpp"

namespace lcrprobe::model {

struct EpochLog {
  std::size_t epoch = 0;   // 1-based
  double mean_loss = 0.0;  // mean step loss (data term + L2 penalty)
  double train_acc = 0.0;  // running accuracy over the epoch's forward passes
};

struct TrainResult {
  std::vector<EpochLog> log;
};

// Mini-batch SGD with momentum: per epoch, shuffle with the "shuffle"
// stream, accumulate mean gradients over each batch, add the L2 term once
// per step over weight parameters, and apply the momentum update. Aborts
// with the epoch index if the loss diverges to NaN.
TrainResult train(const std::vector<corpus::OpinionInstance>& instances,
                  const corpus::EmbeddingTable& table, ModelParams& params,
                  const HyperParams& hp, const num::RandomStreams& streams,
                  std::ostream* progress = nullptr);

struct ClassStats {
  std::size_t frequency = 0;
  std::size_t correct = 0;
  double accuracy() const {
    return frequency == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(frequency);
  }
};

struct EvalReport {
  std::array<ClassStats, kClassCount> per_class;  // Positive, Neutral, Negative
  ClassStats overall;
};

EvalReport evaluate(const std::vector<corpus::OpinionInstance>& instances,
                    const corpus::EmbeddingTable& table, ModelParams& params,
                    const HyperParams& hp);

// Frequency and accuracy per polarity class and overall, for the training
// and (optionally) test sets.
std::string format_accuracy_table(const EvalReport& train, const EvalReport* test);

std::string format_training_log_csv(const TrainResult& result);

}  // namespace lcrprobe::model

#endif
