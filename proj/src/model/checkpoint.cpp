#include "lcrprobe/model/checkpoint.hpp"

#include <sstream>
#include <stdexcept>

#include "lcrprobe/util.hpp"

namespace lcrprobe::model {

namespace {
constexpr const char* kMagic = "lcrprobe-checkpoint v1";
}

void save_checkpoint(const std::string& path, const HyperParams& hp, ModelParams& params) {
  std::ostringstream out;
  out << kMagic << "\n";
  out << "seed " << hp.seed << "\n";
  out << "hops " << hp.hops << "\n";
  out << "hidden " << hp.hidden << "\n";
  out << "embed_dim " << params.embed_dim << "\n";
  out << "epochs " << hp.epochs << "\n";
  out << "learning_rate " << util::format_double(hp.learning_rate) << "\n";
  out << "l2_lambda " << util::format_double(hp.l2_lambda) << "\n";
  out << "momentum " << util::format_double(hp.momentum) << "\n";
  out << "batch_size " << hp.batch_size << "\n";
  out << "dropout_rate " << util::format_double(hp.dropout_rate) << "\n";
  out << "forget_bias " << util::format_double(hp.forget_bias) << "\n";
  out << "dropout_sentence " << (hp.dropout_sentence ? 1 : 0) << "\n";

  std::vector<num::Parameter*> all = params.all();
  out << "params " << all.size() << "\n";
  for (const num::Parameter* p : all) {
    out << "tensor " << p->name << " " << p->value.rank();
    for (std::size_t d : p->value.shape) out << " " << d;
    out << "\n";
    for (std::size_t i = 0; i < p->value.numel(); ++i) {
      if (i) out << " ";
      out << util::format_double(p->value[i]);
    }
    out << "\n";
  }
  util::write_file(path, out.str());
}

LoadedModel load_checkpoint(const std::string& path) {
  std::istringstream in(util::read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }

  HyperParams hp;
  std::size_t embed_dim = 0;
  std::size_t param_count = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "seed") {
      ls >> hp.seed;
    } else if (key == "hops") {
      ls >> hp.hops;
    } else if (key == "hidden") {
      ls >> hp.hidden;
    } else if (key == "embed_dim") {
      ls >> embed_dim;
    } else if (key == "epochs") {
      ls >> hp.epochs;
    } else if (key == "learning_rate") {
      ls >> hp.learning_rate;
    } else if (key == "l2_lambda") {
      ls >> hp.l2_lambda;
    } else if (key == "momentum") {
      ls >> hp.momentum;
    } else if (key == "batch_size") {
      ls >> hp.batch_size;
    } else if (key == "dropout_rate") {
      ls >> hp.dropout_rate;
    } else if (key == "forget_bias") {
      ls >> hp.forget_bias;
    } else if (key == "dropout_sentence") {
      int v = 0;
      ls >> v;
      hp.dropout_sentence = v != 0;
    } else if (key == "params") {
      ls >> param_count;
      break;
    } else {
      throw std::runtime_error("checkpoint " + path + ": unknown header key '" + key + "'");
    }
  }
  if (embed_dim == 0) throw std::runtime_error("checkpoint " + path + ": missing embed_dim");

  // Build a parameter set of the right shapes, then overwrite the values.
  num::Rng scratch(0);
  auto params = std::make_unique<ModelParams>(embed_dim, hp, scratch);
  std::vector<num::Parameter*> all = params->all();
  if (all.size() != param_count) {
    throw std::runtime_error("checkpoint " + path + ": expected " + std::to_string(all.size()) +
                             " tensors, file declares " + std::to_string(param_count));
  }

  for (num::Parameter* p : all) {
    std::string tag, name;
    std::size_t rank = 0;
    if (!(in >> tag >> name >> rank) || tag != "tensor") {
      throw std::runtime_error("checkpoint " + path + ": truncated tensor table");
    }
    if (name != p->name) {
      throw std::runtime_error("checkpoint " + path + ": tensor '" + name + "' does not match '" +
                               p->name + "'");
    }
    std::vector<std::size_t> shape(rank);
    for (std::size_t& d : shape) in >> d;
    if (shape != p->value.shape) {
      throw std::runtime_error("checkpoint " + path + ": shape mismatch for " + name);
    }
    std::string value;
    for (std::size_t i = 0; i < p->value.numel(); ++i) {
      if (!(in >> value)) {
        throw std::runtime_error("checkpoint " + path + ": truncated values for " + name);
      }
      p->value[i] = util::parse_double(value);
    }
  }
  return LoadedModel{hp, std::move(params)};
}

}  // namespace lcrprobe::model
