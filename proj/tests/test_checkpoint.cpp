#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "noge/checkpoint.hpp"
#include "noge/config.hpp"
#include "noge/errors.hpp"

using namespace noge;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("noge_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

}  // namespace

TEST_CASE("checkpoint round-trips byte-identically") {
  const fs::path dir = temp_dir("ckpt");
  Model m = init_model({EncoderKind::dualqgnn, 2, 3}, DecoderKind::quate, 6, 4, 23);
  AdamState adam = init_adam(m.params);
  adam.step = 17;
  adam.m[0].c[0][0] = 0.25;
  adam.v[1].c[3][1] = 1.5;
  CheckpointMeta meta;
  meta.epoch = 12;
  meta.best_valid_mrr = 0.625;
  meta.best_epoch = 9;
  meta.seed = 23;
  const uint64_t digest = 0xabcdef0123456789ull;

  const fs::path p1 = dir / "a.ckpt";
  const fs::path p2 = dir / "b.ckpt";
  save_checkpoint(p1, m, &adam, meta, digest);
  LoadedCheckpoint loaded = load_checkpoint(p1);
  CHECK(loaded.digest == digest);
  CHECK(loaded.meta.epoch == 12);
  CHECK(loaded.meta.best_valid_mrr == 0.625);
  CHECK(loaded.meta.best_epoch == 9);
  CHECK(loaded.meta.seed == 23);
  REQUIRE(loaded.adam.has_value());
  CHECK(loaded.adam->step == 17);
  CHECK(loaded.model.encoder.kind == EncoderKind::dualqgnn);
  CHECK(loaded.model.entity_count == 6);
  CHECK(loaded.model.num_relations == 4);

  save_checkpoint(p2, loaded.model, &*loaded.adam, loaded.meta, loaded.digest);
  CHECK(slurp(p1) == slurp(p2));

  SUBCASE("parameters survive exactly") {
    const auto ta = param_tensors(m.params);
    const auto tb = param_tensors(loaded.model.params);
    REQUIRE(ta.size() == tb.size());
    for (size_t i = 0; i < ta.size(); ++i) {
      REQUIRE(ta[i]->flat_count() == tb[i]->flat_count());
      for (int64_t k = 0; k < ta[i]->flat_count(); ++k)
        CHECK(ta[i]->get_flat(k) == tb[i]->get_flat(k));
    }
  }

  SUBCASE("without adam state") {
    const fs::path p3 = dir / "c.ckpt";
    save_checkpoint(p3, m, nullptr, meta, digest);
    const LoadedCheckpoint l3 = load_checkpoint(p3);
    CHECK(!l3.adam.has_value());
  }

  SUBCASE("corrupt magic is rejected") {
    std::ofstream os(dir / "bad.ckpt", std::ios::binary);
    os << "NOTACKPT stuff";
    os.close();
    CHECK_THROWS_AS(load_checkpoint(dir / "bad.ckpt"), DataError);
  }
}

TEST_CASE("config digest separates model-affecting settings") {
  RunConfig a;
  a.encoder = {EncoderKind::dualqgnn, 2, 16};
  RunConfig b = a;
  CHECK(config_digest(a, 10, 4) == config_digest(b, 10, 4));

  b.encoder.dim = 32;
  CHECK(config_digest(a, 10, 4) != config_digest(b, 10, 4));
  b = a;
  b.adjacency = AdjacencyKind::binary;
  CHECK(config_digest(a, 10, 4) != config_digest(b, 10, 4));
  b = a;
  b.self_loop = SelfLoopMode::single;
  CHECK(config_digest(a, 10, 4) != config_digest(b, 10, 4));
  b = a;
  b.decoder = DecoderKind::distmult;
  CHECK(config_digest(a, 10, 4) != config_digest(b, 10, 4));
  // dataset dimensions are part of the digest
  CHECK(config_digest(a, 10, 4) != config_digest(a, 11, 4));
  // the seed is not: evaluating under a different seed is fine
  b = a;
  b.seed = 999;
  CHECK(config_digest(a, 10, 4) == config_digest(b, 10, 4));
}

TEST_CASE("config file loading with defaults and validation") {
  const fs::path dir = temp_dir("cfg");
  {
    std::ofstream os(dir / "run.json");
    os << R"({
      "dataset_dir": "/data/kg",
      "output_dir": "/out/run1",
      "seed": 7,
      "encoder": {"kind": "qgnn", "layers": 3, "dim": 64},
      "decoder": "quate",
      "adjacency": "binary",
      "self_loop_mode": "single",
      "train": {"lr": 0.0005, "batch_size": 512, "epochs": 100, "eval_every": 5}
    })";
  }
  const RunConfig cfg = load_config_file(dir / "run.json");
  CHECK(cfg.dataset_dir == "/data/kg");
  CHECK(cfg.encoder.kind == EncoderKind::qgnn);
  CHECK(cfg.encoder.num_layers == 3);
  CHECK(cfg.encoder.dim == 64);
  CHECK(cfg.adjacency == AdjacencyKind::binary);
  CHECK(cfg.self_loop == SelfLoopMode::single);
  CHECK(cfg.train.learning_rate == 0.0005);
  CHECK(cfg.train.batch_size == 512);
  CHECK(cfg.train.epochs == 100);
  CHECK(cfg.train.eval_every == 5);
  CHECK(cfg.train.seed == 7);  // train seed follows the run seed
  // untouched fields keep defaults
  CHECK(cfg.train.label_smoothing == 0.0);
  CHECK(cfg.add_inverses == true);
  validate_config(cfg);

  SUBCASE("unknown enum value") {
    std::ofstream os(dir / "bad.json");
    os << R"({"encoder": {"kind": "transformer"}})";
    os.close();
    CHECK_THROWS_AS(load_config_file(dir / "bad.json"), UsageError);
  }

  SUBCASE("gcn + quate is rejected") {
    RunConfig c;
    c.encoder.kind = EncoderKind::gcn;
    c.decoder = DecoderKind::quate;
    CHECK_THROWS_AS(validate_config(c), UsageError);
  }

  SUBCASE("bad numeric ranges are rejected") {
    RunConfig c;
    c.train.learning_rate = 0.0;
    CHECK_THROWS_AS(validate_config(c), UsageError);
    c = RunConfig{};
    c.train.label_smoothing = 1.0;
    CHECK_THROWS_AS(validate_config(c), UsageError);
    c = RunConfig{};
    c.encoder.dim = 0;
    CHECK_THROWS_AS(validate_config(c), UsageError);
  }
}

TEST_CASE("config json round trip") {
  RunConfig cfg;
  cfg.dataset_dir = "/d";
  cfg.output_dir = "/o";
  cfg.encoder = {EncoderKind::gcn, 2, 8};
  cfg.decoder = DecoderKind::distmult;
  const std::string text = config_to_json(cfg);
  const fs::path dir = temp_dir("cfg_rt");
  {
    std::ofstream os(dir / "rt.json");
    os << text;
  }
  const RunConfig back = load_config_file(dir / "rt.json");
  CHECK(back.encoder.kind == cfg.encoder.kind);
  CHECK(back.encoder.num_layers == cfg.encoder.num_layers);
  CHECK(back.encoder.dim == cfg.encoder.dim);
  CHECK(back.decoder == cfg.decoder);
  CHECK(config_to_json(back) == text);
}
