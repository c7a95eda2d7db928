#pragma once

#include <filesystem>

#include "dualgp/policy_iteration.hpp"

namespace dualgp::cli {

inline constexpr const char* kModelFileName = "models.bin";

// Everything a rollout needs: the environment, the force discretization and
// the three fitted GPs (two dynamics outputs plus the value function).
struct TrainedModels {
  EnvConfig env;
  int n_force = 128;
  DynamicsModel dynamics;
  ValueModel value;
};

// Little-endian binary container (magic "DGPM", format version, environment
// constants, then one block per GP: kernel spec, noise variance and the
// training set). Factors are rebuilt on load, so a load-save round trip over
// the same build reproduces identical predictions.
void save_models(const std::filesystem::path& path, const TrainedModels& models);

// Throws IoError on missing files, bad magic or truncated data.
TrainedModels load_models(const std::filesystem::path& path);

}  // namespace dualgp::cli
