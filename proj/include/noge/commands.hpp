#pragma once

#include <filesystem>
#include <string>

#include "noge/checkpoint.hpp"
#include "noge/config.hpp"

namespace noge {

// Preprocess artifacts reloaded from output_dir.
struct Artifacts {
  Dataset dataset;
  WeightedAdjacency adjacency;
};

void cmd_preprocess(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg, bool resume);
void cmd_eval(const RunConfig& cfg, const std::filesystem::path& checkpoint,
              const std::string& split);
void cmd_score(const RunConfig& cfg, const std::filesystem::path& checkpoint,
               const std::string& head, const std::string& relation,
               const std::string& tail, int topk);

// Reads dicts, encoded splits, and the adjacency back; verifies they are
// consistent with the configuration.
Artifacts load_artifacts(const RunConfig& cfg);

}  // namespace noge
