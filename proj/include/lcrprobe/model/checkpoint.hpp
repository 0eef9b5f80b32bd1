#ifndef LCRPROBE_MODEL_CHECKPOINT_HPP
#define LCRPROBE_MODEL_CHECKPOINT_HPP

#include <memory>
#include <string>

#include "lcrprobe/model/lcr_rot_hop.hpp"

namespace lcrprobe::model {

// Versioned text container: hyperparameters, the random root seed, and every
// named parameter tensor with its shape. Values render in the shortest form
// that parses back to the identical double, so save/load round-trips
// bit-exactly.
void save_checkpoint(const std::string& path, const HyperParams& hp, ModelParams& params);

struct LoadedModel {
  HyperParams hp;
  std::unique_ptr<ModelParams> params;
};

LoadedModel load_checkpoint(const std::string& path);

}  // namespace lcrprobe::model

#endif
