#pragma once

#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>

#include "sortline/nn/adam.hpp"
#include "sortline/nn/network.hpp"

namespace sortline::nn {

inline constexpr const char* kCheckpointFormat = "sortline-checkpoint";
inline constexpr int kCheckpointVersion = 1;

nlohmann::json network_to_json(const Network& net);
/// Throws ShapeError if the parameter array does not match the layer sizes.
Network network_from_json(const nlohmann::json& j);

nlohmann::json adam_to_json(const Adam& opt);
/// Rebuilds optimiser state for `parameter_count` parameters.
Adam adam_from_json(const nlohmann::json& j, size_t parameter_count);

/// Named networks plus free-form metadata (algorithm, episode, ...).
struct Checkpoint {
  std::map<std::string, Network> networks;
  nlohmann::json meta = nlohmann::json::object();
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sortline::nn
