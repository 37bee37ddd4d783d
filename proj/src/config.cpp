#include "noge/config.hpp"

#include <fstream>

#include <json.hpp>

#include "noge/errors.hpp"

namespace noge {

using nlohmann::json;

const char* adjacency_kind_name(AdjacencyKind k) {
  return k == AdjacencyKind::weighted ? "weighted" : "binary";
}

AdjacencyKind adjacency_kind_from(const std::string& name) {
  if (name == "weighted") return AdjacencyKind::weighted;
  if (name == "binary") return AdjacencyKind::binary;
  throw UsageError("unknown adjacency kind: " + name);
}

const char* self_loop_mode_name(SelfLoopMode m) {
  return m == SelfLoopMode::doubled ? "doubled" : "single";
}

SelfLoopMode self_loop_mode_from(const std::string& name) {
  if (name == "doubled") return SelfLoopMode::doubled;
  if (name == "single") return SelfLoopMode::single;
  throw UsageError("unknown self_loop_mode: " + name);
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config file " + path.string() + ": " + e.what());
  }
  RunConfig cfg;
  try {
    if (j.contains("dataset_dir")) cfg.dataset_dir = j["dataset_dir"].get<std::string>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("encoder")) {
      const json& e = j["encoder"];
      if (e.contains("kind")) cfg.encoder.kind = encoder_kind_from(e["kind"].get<std::string>());
      if (e.contains("layers")) cfg.encoder.num_layers = e["layers"].get<int>();
      if (e.contains("dim")) cfg.encoder.dim = e["dim"].get<int>();
    }
    if (j.contains("decoder")) cfg.decoder = decoder_kind_from(j["decoder"].get<std::string>());
    if (j.contains("adjacency")) cfg.adjacency = adjacency_kind_from(j["adjacency"].get<std::string>());
    if (j.contains("self_loop_mode")) cfg.self_loop = self_loop_mode_from(j["self_loop_mode"].get<std::string>());
    if (j.contains("add_inverses")) cfg.add_inverses = j["add_inverses"].get<bool>();
    if (j.contains("dump_adjacency")) cfg.dump_adjacency = j["dump_adjacency"].get<bool>();
    if (j.contains("train")) {
      const json& t = j["train"];
      if (t.contains("lr")) cfg.train.learning_rate = t["lr"].get<double>();
      if (t.contains("batch_size")) cfg.train.batch_size = t["batch_size"].get<int>();
      if (t.contains("epochs")) cfg.train.epochs = t["epochs"].get<int>();
      if (t.contains("eval_every")) cfg.train.eval_every = t["eval_every"].get<int>();
      if (t.contains("label_smoothing")) cfg.train.label_smoothing = t["label_smoothing"].get<double>();
    }
  } catch (const json::exception& e) {
    throw UsageError("config file " + path.string() + ": " + e.what());
  }
  cfg.train.seed = cfg.seed;
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.encoder.dim < 1) throw UsageError("encoder dim must be >= 1");
  if (cfg.encoder.num_layers < 1) throw UsageError("encoder layers must be >= 1");
  if (cfg.decoder == DecoderKind::quate && cfg.encoder.kind == EncoderKind::gcn)
    throw UsageError("quate decoder cannot pair with the gcn encoder; use distmult");
  if (cfg.train.learning_rate <= 0.0) throw UsageError("learning rate must be > 0");
  if (cfg.train.batch_size < 1) throw UsageError("batch size must be >= 1");
  if (cfg.train.epochs < 0) throw UsageError("epochs must be >= 0");
  if (cfg.train.eval_every < 1) throw UsageError("eval_every must be >= 1");
  if (cfg.train.label_smoothing < 0.0 || cfg.train.label_smoothing >= 1.0)
    throw UsageError("label smoothing must be in [0, 1)");
}

uint64_t config_digest(const RunConfig& cfg, int64_t entity_count,
                       int32_t num_relations_augmented) {
  std::string s;
  s += "enc=";
  s += encoder_kind_name(cfg.encoder.kind);
  s += ";layers=" + std::to_string(cfg.encoder.num_layers);
  s += ";dim=" + std::to_string(cfg.encoder.dim);
  s += ";dec=";
  s += decoder_kind_name(cfg.decoder);
  s += ";adj=";
  s += adjacency_kind_name(cfg.adjacency);
  s += ";loop=";
  s += self_loop_mode_name(cfg.self_loop);
  s += ";inv=" + std::to_string(cfg.add_inverses ? 1 : 0);
  s += ";entities=" + std::to_string(entity_count);
  s += ";relations=" + std::to_string(num_relations_augmented);
  uint64_t h = 1469598103934665603ull;
  for (char ch : s)
    h = (h ^ static_cast<uint64_t>(static_cast<unsigned char>(ch))) * 1099511628211ull;
  return h;
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["dataset_dir"] = cfg.dataset_dir.string();
  j["output_dir"] = cfg.output_dir.string();
  j["seed"] = cfg.seed;
  j["encoder"] = {{"kind", encoder_kind_name(cfg.encoder.kind)},
                  {"layers", cfg.encoder.num_layers},
                  {"dim", cfg.encoder.dim}};
  j["decoder"] = decoder_kind_name(cfg.decoder);
  j["adjacency"] = adjacency_kind_name(cfg.adjacency);
  j["self_loop_mode"] = self_loop_mode_name(cfg.self_loop);
  j["add_inverses"] = cfg.add_inverses;
  j["dump_adjacency"] = cfg.dump_adjacency;
  j["train"] = {{"lr", cfg.train.learning_rate},
                {"batch_size", cfg.train.batch_size},
                {"epochs", cfg.train.epochs},
                {"eval_every", cfg.train.eval_every},
                {"label_smoothing", cfg.train.label_smoothing}};
  return j.dump(2) + "\n";
}

}  // namespace noge
