#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "inkmotion/nn/tensor.hpp"

namespace inkmotion::nn {

// Flat binary checkpoint: magic, architecture tag, shape table, then raw
// little-endian f64 parameter data. Hyperparameters go to a JSON sidecar at
// <path>.json.
void save_checkpoint(const std::filesystem::path& path, const std::string& arch_tag,
                     const std::vector<std::pair<std::string, const Tensor*>>& tensors,
                     const nlohmann::json& sidecar);

struct Checkpoint {
  std::string arch_tag;
  std::vector<std::pair<std::string, Tensor>> tensors;
  nlohmann::json sidecar;

  const Tensor& get(const std::string& name) const;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace inkmotion::nn
