#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "noge/training.hpp"

namespace noge {

// Extra training state carried by a checkpoint alongside the parameters.
struct CheckpointMeta {
  int epoch = 0;               // completed epochs
  double best_valid_mrr = -1.0;
  int best_epoch = -1;
  uint64_t seed = 0;
  int64_t adam_step = 0;
};

// Little-endian binary: magic, format version, config digest, a
// length-prefixed JSON header (shapes and metadata), then the raw
// double-precision arrays in declaration order (embeddings, layer weights;
// Adam first/second moments when present). Saving is deterministic, so
// save -> load -> save round-trips byte-identically.
void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const AdamState* adam, const CheckpointMeta& meta,
                     uint64_t digest);

struct LoadedCheckpoint {
  Model model;
  std::optional<AdamState> adam;
  CheckpointMeta meta;
  uint64_t digest = 0;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace noge
