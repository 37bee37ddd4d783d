#include "noge/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "noge/errors.hpp"

namespace noge {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr char kTripleMagic[8] = {'N', 'O', 'G', 'E', 'T', 'R', 'P', '1'};
constexpr char kAdjMagic[8] = {'N', 'O', 'G', 'E', 'A', 'D', 'J', '1'};

// Guards output_dir against concurrent writers for the lifetime of a command.
class OutputLock {
 public:
  explicit OutputLock(const fs::path& dir) : path_(dir / ".lock") {
    std::FILE* f = std::fopen(path_.string().c_str(), "wx");
    if (!f)
      throw UsageError("output directory is locked (found " + path_.string() +
                       "); is another command running?");
    std::fclose(f);
  }
  ~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  fs::path path_;
};

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_raw(std::ostream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_raw(std::istream& is, void* p, size_t n, const char* what) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!is) throw IoError(std::string("truncated ") + what);
}

void write_dict(const fs::path& path, const std::vector<std::string>& tokens) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  for (size_t i = 0; i < tokens.size(); ++i) os << i << '\t' << tokens[i] << '\n';
}

std::vector<std::string> read_dict(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("missing artifact " + path.string() + "; run preprocess first");
  std::vector<std::string> tokens;
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path.string() + ": malformed dict line " + std::to_string(line_no));
    const size_t idx = std::stoull(line.substr(0, tab));
    if (idx != tokens.size())
      throw DataError(path.string() + ": non-sequential index at line " +
                      std::to_string(line_no));
    tokens.push_back(line.substr(tab + 1));
  }
  return tokens;
}

void write_triples_bin(const fs::path& path, const std::vector<Triple>& triples) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  write_raw(os, kTripleMagic, sizeof(kTripleMagic));
  const uint64_t count = triples.size();
  write_raw(os, &count, sizeof(count));
  for (const Triple& t : triples) {
    const uint32_t v[3] = {static_cast<uint32_t>(t.h), static_cast<uint32_t>(t.r),
                           static_cast<uint32_t>(t.t)};
    write_raw(os, v, sizeof(v));
  }
}

std::vector<Triple> read_triples_bin(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("missing artifact " + path.string() + "; run preprocess first");
  char magic[8];
  read_raw(is, magic, sizeof(magic), "triple file");
  if (std::memcmp(magic, kTripleMagic, sizeof(kTripleMagic)) != 0)
    throw DataError("not a triple artifact: " + path.string());
  uint64_t count = 0;
  read_raw(is, &count, sizeof(count), "triple file");
  std::vector<Triple> out;
  out.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    uint32_t v[3];
    read_raw(is, v, sizeof(v), "triple file");
    out.push_back({static_cast<int32_t>(v[0]), static_cast<int32_t>(v[1]),
                   static_cast<int32_t>(v[2])});
  }
  return out;
}

void write_adjacency_bin(const fs::path& path, const WeightedAdjacency& adj) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  write_raw(os, kAdjMagic, sizeof(kAdjMagic));
  const uint32_t kind = adj.kind == AdjacencyKind::weighted ? 0u : 1u;
  const uint32_t reserved = 0;
  write_raw(os, &kind, sizeof(kind));
  write_raw(os, &reserved, sizeof(reserved));
  const uint64_t dim = static_cast<uint64_t>(adj.m.dim);
  const uint64_t nnz = static_cast<uint64_t>(adj.m.nnz());
  write_raw(os, &dim, sizeof(dim));
  write_raw(os, &nnz, sizeof(nnz));
  write_raw(os, adj.m.row_ptr.data(), adj.m.row_ptr.size() * sizeof(int64_t));
  write_raw(os, adj.m.col.data(), adj.m.col.size() * sizeof(int32_t));
  write_raw(os, adj.m.val.data(), adj.m.val.size() * sizeof(double));
}

WeightedAdjacency read_adjacency_bin(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("missing artifact " + path.string() + "; run preprocess first");
  char magic[8];
  read_raw(is, magic, sizeof(magic), "adjacency file");
  if (std::memcmp(magic, kAdjMagic, sizeof(kAdjMagic)) != 0)
    throw DataError("not an adjacency artifact: " + path.string());
  uint32_t kind = 0, reserved = 0;
  read_raw(is, &kind, sizeof(kind), "adjacency file");
  read_raw(is, &reserved, sizeof(reserved), "adjacency file");
  uint64_t dim = 0, nnz = 0;
  read_raw(is, &dim, sizeof(dim), "adjacency file");
  read_raw(is, &nnz, sizeof(nnz), "adjacency file");
  WeightedAdjacency adj;
  adj.kind = kind == 0 ? AdjacencyKind::weighted : AdjacencyKind::binary;
  adj.m.dim = static_cast<int64_t>(dim);
  adj.m.row_ptr.resize(dim + 1);
  adj.m.col.resize(nnz);
  adj.m.val.resize(nnz);
  read_raw(is, adj.m.row_ptr.data(), adj.m.row_ptr.size() * sizeof(int64_t), "adjacency file");
  read_raw(is, adj.m.col.data(), adj.m.col.size() * sizeof(int32_t), "adjacency file");
  read_raw(is, adj.m.val.data(), adj.m.val.size() * sizeof(double), "adjacency file");
  return adj;
}

// Re-applies inverse augmentation to raw-encoded split triples.
std::vector<Triple> augment(const std::vector<Triple>& raw, int32_t r0) {
  std::vector<Triple> out;
  out.reserve(raw.size() * 2);
  for (const Triple& t : raw) {
    out.push_back(t);
    out.push_back({t.t, t.r + r0, t.h});
  }
  return out;
}

// stdout + file sink for training log lines.
class TeeStream : public std::ostream {
  class Buf : public std::streambuf {
   public:
    Buf(std::streambuf* a, std::streambuf* b) : a_(a), b_(b) {}

   protected:
    int overflow(int ch) override {
      if (ch == EOF) return !EOF;
      const int r1 = a_->sputc(static_cast<char>(ch));
      const int r2 = b_->sputc(static_cast<char>(ch));
      return (r1 == EOF || r2 == EOF) ? EOF : ch;
    }
    int sync() override {
      const int r1 = a_->pubsync();
      const int r2 = b_->pubsync();
      return (r1 == 0 && r2 == 0) ? 0 : -1;
    }

   private:
    std::streambuf* a_;
    std::streambuf* b_;
  };

 public:
  TeeStream(std::ostream& a, std::ostream& b)
      : std::ostream(nullptr), buf_(a.rdbuf(), b.rdbuf()) {
    rdbuf(&buf_);
  }

 private:
  Buf buf_;
};

}  // namespace

void cmd_preprocess(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.dataset_dir.empty()) throw UsageError("preprocess: --dataset-dir required");
  if (cfg.output_dir.empty()) throw UsageError("preprocess: --output-dir required");

  const auto train_raw = load_triples_file(cfg.dataset_dir / "train.txt");
  const auto valid_raw = load_triples_file(cfg.dataset_dir / "valid.txt");
  const auto test_raw = load_triples_file(cfg.dataset_dir / "test.txt");

  Vocabulary vocab = build_vocabulary(train_raw);
  Dataset dataset =
      encode_dataset(train_raw, valid_raw, test_raw, std::move(vocab), cfg.add_inverses);

  const NodeSpace ns = node_space(dataset);
  const CoocCounts counts = count_cooccurrence(dataset.train, ns);
  const WeightedAdjacency adj = cfg.adjacency == AdjacencyKind::weighted
                                    ? build_weighted_adjacency(counts, ns)
                                    : build_binary_adjacency(counts, ns);

  fs::create_directories(cfg.output_dir);
  OutputLock lock(cfg.output_dir);

  write_dict(cfg.output_dir / "entities.dict", dataset.vocab.entity_tokens);
  write_dict(cfg.output_dir / "relations.dict", dataset.vocab.relation_tokens);
  write_triples_bin(cfg.output_dir / "train.bin", dataset.original_triples(dataset.train));
  write_triples_bin(cfg.output_dir / "valid.bin", dataset.original_triples(dataset.valid));
  write_triples_bin(cfg.output_dir / "test.bin", dataset.original_triples(dataset.test));
  write_adjacency_bin(cfg.output_dir / "adjacency.bin", adj);
  if (cfg.dump_adjacency) {
    std::ofstream tsv(cfg.output_dir / "adjacency.tsv", std::ios::binary | std::ios::trunc);
    dump_adjacency_tsv(adj.m, tsv);
  }

  json manifest;
  manifest["add_inverses"] = cfg.add_inverses;
  manifest["adjacency"] = adjacency_kind_name(cfg.adjacency);
  manifest["entities"] = dataset.entity_count();
  manifest["relations"] = dataset.vocab.relation_count();
  manifest["nodes"] = dataset.vocab.node_count();
  manifest["relations_augmented"] = dataset.num_relations();
  manifest["nodes_augmented"] = dataset.node_count();
  manifest["nnz"] = adj.m.nnz();
  manifest["train_triples"] = train_raw.size();
  manifest["valid_triples"] = valid_raw.size();
  manifest["test_triples"] = test_raw.size();
  const std::string text = manifest.dump(2) + "\n";
  std::ofstream mf(cfg.output_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!mf) throw IoError("cannot write manifest.json");
  mf << text;
  std::cout << manifest.dump() << "\n";
}

Artifacts load_artifacts(const RunConfig& cfg) {
  if (cfg.output_dir.empty()) throw UsageError("--output-dir required");
  std::ifstream mf(cfg.output_dir / "manifest.json");
  if (!mf)
    throw DataError("missing manifest.json in " + cfg.output_dir.string() +
                    "; run preprocess first");
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest.json parse error: ") + e.what());
  }
  const bool add_inverses = manifest.at("add_inverses").get<bool>();
  const std::string adj_kind = manifest.at("adjacency").get<std::string>();
  if (add_inverses != cfg.add_inverses)
    throw DataError("artifacts were preprocessed with add_inverses=" +
                    std::string(add_inverses ? "true" : "false") +
                    " but the config requests the opposite; re-run preprocess");
  if (adj_kind != adjacency_kind_name(cfg.adjacency))
    throw DataError("artifacts hold a " + adj_kind +
                    " adjacency but the config requests " +
                    adjacency_kind_name(cfg.adjacency) + "; re-run preprocess");

  Artifacts a;
  a.dataset.vocab.entity_tokens = read_dict(cfg.output_dir / "entities.dict");
  a.dataset.vocab.relation_tokens = read_dict(cfg.output_dir / "relations.dict");
  for (size_t i = 0; i < a.dataset.vocab.entity_tokens.size(); ++i)
    a.dataset.vocab.entity_ids[a.dataset.vocab.entity_tokens[i]] = static_cast<int32_t>(i);
  for (size_t i = 0; i < a.dataset.vocab.relation_tokens.size(); ++i)
    a.dataset.vocab.relation_ids[a.dataset.vocab.relation_tokens[i]] = static_cast<int32_t>(i);

  const int32_t r0 = a.dataset.vocab.relation_count();
  a.dataset.inverse_augmented = add_inverses;
  auto load_split = [&](const char* name) {
    std::vector<Triple> raw = read_triples_bin(cfg.output_dir / name);
    return add_inverses ? augment(raw, r0) : raw;
  };
  a.dataset.train = load_split("train.bin");
  a.dataset.valid = load_split("valid.bin");
  a.dataset.test = load_split("test.bin");

  a.adjacency = read_adjacency_bin(cfg.output_dir / "adjacency.bin");
  if (a.adjacency.m.dim != a.dataset.node_count())
    throw DataError("adjacency dimension does not match the vocabulary; artifacts "
                    "are inconsistent");
  return a;
}

void cmd_train(const RunConfig& cfg, bool resume) {
  validate_config(cfg);
  Artifacts art = load_artifacts(cfg);
  OutputLock lock(cfg.output_dir);
  const NormalizedAdjacency norm = renormalize(art.adjacency, cfg.self_loop);
  const uint64_t digest =
      config_digest(cfg, art.dataset.entity_count(), art.dataset.num_relations());

  Model model;
  FitContext ctx;
  const fs::path last_path = cfg.output_dir / "last.ckpt";
  const fs::path best_path = cfg.output_dir / "best.ckpt";
  bool resumed = false;
  if (resume && fs::exists(last_path)) {
    LoadedCheckpoint last = load_checkpoint(last_path);
    if (last.digest != digest)
      throw DataError("last.ckpt digest does not match the current config");
    model = std::move(last.model);
    if (last.adam) ctx.adam = std::move(*last.adam);
    ctx.epoch = last.meta.epoch;
    ctx.best_valid_mrr = last.meta.best_valid_mrr;
    ctx.best_epoch = last.meta.best_epoch;
    if (fs::exists(best_path)) {
      LoadedCheckpoint best = load_checkpoint(best_path);
      if (best.digest != digest)
        throw DataError("best.ckpt digest does not match the current config");
      ctx.best_params = std::move(best.model.params);
    }
    resumed = true;
  } else {
    model = init_model(cfg.encoder, cfg.decoder, art.dataset.entity_count(),
                       art.dataset.num_relations(), cfg.seed);
  }

  std::ofstream log_file(cfg.output_dir / "train.log",
                         std::ios::binary | (resumed ? std::ios::app : std::ios::trunc));
  if (!log_file) throw IoError("cannot write train.log");
  TeeStream tee(log_file, std::cout);

  fit(model, art.dataset, norm, cfg.train, ctx, &tee);

  CheckpointMeta last_meta;
  last_meta.epoch = ctx.epoch;
  last_meta.best_valid_mrr = ctx.best_valid_mrr;
  last_meta.best_epoch = ctx.best_epoch;
  last_meta.seed = cfg.seed;
  save_checkpoint(last_path, model, &ctx.adam, last_meta, digest);

  Model best = model;
  CheckpointMeta best_meta = last_meta;
  if (ctx.best_epoch >= 0) {
    best.params = ctx.best_params;
    best_meta.epoch = ctx.best_epoch;
  }
  save_checkpoint(best_path, best, nullptr, best_meta, digest);

  std::cout << "{\"best_epoch\":" << ctx.best_epoch << ",\"best_valid_mrr\":"
            << fmt_double(ctx.best_valid_mrr) << ",\"epochs\":" << ctx.epoch << "}\n";
}

namespace {

std::string metrics_report(const std::string& split, const Metrics& m) {
  std::ostringstream os;
  os << "{\"split\":\"" << split << "\",\"mrr\":" << fmt_double(m.mrr)
     << ",\"hits1\":" << fmt_double(m.hits1) << ",\"hits3\":" << fmt_double(m.hits3)
     << ",\"hits10\":" << fmt_double(m.hits10) << ",\"queries\":" << m.query_count
     << "}";
  return os.str();
}

}  // namespace

void cmd_eval(const RunConfig& cfg, const fs::path& checkpoint,
              const std::string& split) {
  validate_config(cfg);
  if (split != "valid" && split != "test")
    throw UsageError("unknown split: " + split + " (expected valid or test)");
  Artifacts art = load_artifacts(cfg);
  OutputLock lock(cfg.output_dir);
  const NormalizedAdjacency norm = renormalize(art.adjacency, cfg.self_loop);
  const uint64_t digest =
      config_digest(cfg, art.dataset.entity_count(), art.dataset.num_relations());

  const fs::path ckpt = checkpoint.empty() ? cfg.output_dir / "best.ckpt" : checkpoint;
  LoadedCheckpoint loaded = load_checkpoint(ckpt);
  if (loaded.digest != digest)
    throw DataError("checkpoint/config digest mismatch: the checkpoint was trained "
                    "with different encoder/decoder/adjacency settings or data");

  const std::vector<Triple>& split_triples =
      split == "valid" ? art.dataset.valid : art.dataset.test;
  const std::vector<Triple> originals = art.dataset.original_triples(split_triples);
  const TruthIndex truth_all = build_truth_index(art.dataset, kAllSplits);
  const Metrics m =
      evaluate_model(loaded.model, art.dataset, originals, truth_all, norm);

  const std::string report = metrics_report(split, m);
  std::cout << report << "\n";
  std::ofstream rf(cfg.output_dir / ("eval_" + split + ".json"),
                   std::ios::binary | std::ios::trunc);
  if (!rf) throw IoError("cannot write eval report");
  rf << report << "\n";
}

void cmd_score(const RunConfig& cfg, const fs::path& checkpoint,
               const std::string& head, const std::string& relation,
               const std::string& tail, int topk) {
  validate_config(cfg);
  Artifacts art = load_artifacts(cfg);
  const NormalizedAdjacency norm = renormalize(art.adjacency, cfg.self_loop);
  const uint64_t digest =
      config_digest(cfg, art.dataset.entity_count(), art.dataset.num_relations());
  const fs::path ckpt = checkpoint.empty() ? cfg.output_dir / "best.ckpt" : checkpoint;
  LoadedCheckpoint loaded = load_checkpoint(ckpt);
  if (loaded.digest != digest)
    throw DataError("checkpoint/config digest mismatch");

  const Vocabulary& vocab = art.dataset.vocab;
  if (relation == "?") throw UsageError("relation wildcard is not supported");
  if (head == "?" && tail == "?") throw UsageError("at most one of head/tail may be ?");
  auto rit = vocab.relation_ids.find(relation);
  if (rit == vocab.relation_ids.end()) throw UsageError("unknown relation: " + relation);
  auto entity_id = [&](const std::string& tok) {
    auto it = vocab.entity_ids.find(tok);
    if (it == vocab.entity_ids.end()) throw UsageError("unknown entity: " + tok);
    return it->second;
  };

  const Model& model = loaded.model;
  const Tensor enc_out = encoder_forward(model.params, norm, nullptr);
  const Tensor dreps = decoder_input(model, enc_out);
  const int64_t entities = model.entity_count;

  if (head != "?" && tail != "?") {
    const int32_t h = entity_id(head), t = entity_id(tail);
    const double f =
        score_one(dreps, h, model.relation_node(rit->second), t, model.decoder);
    std::cout << "{\"head\":\"" << head << "\",\"relation\":\"" << relation
              << "\",\"tail\":\"" << tail << "\",\"score\":" << fmt_double(f)
              << ",\"probability\":" << fmt_double(sigmoid(f)) << "}\n";
    return;
  }

  int64_t source;
  int32_t rel = rit->second;
  if (tail == "?") {
    source = entity_id(head);
  } else {
    if (!art.dataset.inverse_augmented)
      throw UsageError("head queries need inverse-augmented artifacts");
    source = entity_id(tail);
    rel = rel + vocab.relation_count();
  }
  std::vector<double> row(static_cast<size_t>(entities));
  score_all_tails(dreps, source, model.relation_node(rel), entities, model.decoder,
                  row);
  std::vector<int32_t> order(static_cast<size_t>(entities));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
    return row[static_cast<size_t>(a)] > row[static_cast<size_t>(b)];
  });
  const int64_t k = std::min<int64_t>(topk, entities);
  for (int64_t i = 0; i < k; ++i) {
    const int32_t e = order[static_cast<size_t>(i)];
    const double f = row[static_cast<size_t>(e)];
    std::cout << "{\"rank\":" << (i + 1) << ",\"entity\":\""
              << vocab.entity_tokens[static_cast<size_t>(e)]
              << "\",\"score\":" << fmt_double(f)
              << ",\"probability\":" << fmt_double(sigmoid(f)) << "}\n";
  }
}

}  // namespace noge
