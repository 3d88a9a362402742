#pragma once

#include <string>

#include "ihnn/model.hpp"
#include "ihnn/training.hpp"

namespace ihnn {

// Self-describing JSON model file: parameters with shapes, the training
// config, and the operator norm the feasibility radius was computed from.
struct ModelFile {
  ModelParams params;
  TrainConfig config;
  double opnorm_a = 0.0;
  std::string dataset_name;
};

void save_model(const ModelFile& model, const std::string& path);

ModelFile load_model(const std::string& path);

}  // namespace ihnn
