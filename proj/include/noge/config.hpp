#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "noge/cooc_graph.hpp"
#include "noge/decoders.hpp"
#include "noge/encoders.hpp"
#include "noge/training.hpp"

namespace noge {

// Full run configuration. Defaults follow the standard training protocol
// (batch 1024, tanh activation, Adam, validation MRR checkpoint selection);
// a JSON config file overrides defaults, CLI flags override the file.
struct RunConfig {
  std::filesystem::path dataset_dir;
  std::filesystem::path output_dir;
  uint64_t seed = 42;

  EncoderConfig encoder;                              // dualqgnn, 1 layer, dim 32
  DecoderKind decoder = DecoderKind::quate;
  AdjacencyKind adjacency = AdjacencyKind::weighted;
  SelfLoopMode self_loop = SelfLoopMode::doubled;
  bool add_inverses = true;
  bool dump_adjacency = false;

  TrainConfig train;
};

RunConfig load_config_file(const std::filesystem::path& path);

// Rejects invalid combinations (gcn + quate, non-positive dims, ...).
void validate_config(const RunConfig& cfg);

// FNV-1a digest of every model-shape-affecting field plus the dataset
// dimensions; stored in checkpoints so eval refuses a mismatched config.
uint64_t config_digest(const RunConfig& cfg, int64_t entity_count,
                       int32_t num_relations_augmented);

std::string config_to_json(const RunConfig& cfg);

const char* adjacency_kind_name(AdjacencyKind k);
AdjacencyKind adjacency_kind_from(const std::string& name);
const char* self_loop_mode_name(SelfLoopMode m);
SelfLoopMode self_loop_mode_from(const std::string& name);

}  // namespace noge
