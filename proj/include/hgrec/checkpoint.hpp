#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hgrec/model.hpp"

namespace hgrec {

// Versioned JSON container of named parameter tensors plus the model shape
// needed to rebuild it. Serialization is deterministic, so identical
// parameters give identical bytes.
void save_checkpoint(const std::filesystem::path& path, ScholarEmbeddingModel& model);

struct LoadedCheckpoint {
  ModelConfig config;
  std::vector<std::string> metapaths;
};

// Reads config/metapath names only.
LoadedCheckpoint read_checkpoint_header(const std::filesystem::path& path);

// Rebuilds the model and fills every parameter by name; shape mismatches and
// missing/unknown names are errors.
ScholarEmbeddingModel load_checkpoint(const std::filesystem::path& path);

}  // namespace hgrec
