#pragma once

#include <filesystem>
#include <string>

#include "umsa/model.hpp"

namespace umsa {

// Self-contained JSON checkpoint: model configuration, parameter values
// (full double precision) and the config hash of the run that wrote it.
void save_checkpoint(Model &model, const std::string &config_hash,
                     const std::filesystem::path &path);

// Rebuilds the model from the stored configuration and parameters.
Model load_checkpoint(const std::filesystem::path &path,
                      std::string *config_hash = nullptr);

}  // namespace umsa
