#pragma once

#include <string>

#include "gvm/model.hpp"

namespace gvm::model {

// Binary parameter checkpoint: magic + version, a JSON config header, then a
// table of named raw-double tensors. Round trips are bit exact.
void save_checkpoint(const std::string& path, const ModelConfig& config,
                     const ModelParams& params);

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
};
Checkpoint load_checkpoint(const std::string& path);

std::string config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const std::string& json_text);

}  // namespace gvm::model
