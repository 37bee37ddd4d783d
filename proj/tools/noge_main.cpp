#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "noge/commands.hpp"
#include "noge/errors.hpp"

namespace {

struct CommonFlags {
  std::optional<std::string> config_file;
  std::optional<std::string> dataset_dir;
  std::optional<std::string> output_dir;
  std::optional<std::string> encoder;
  std::optional<std::string> decoder;
  std::optional<std::string> adjacency;
  std::optional<std::string> self_loop;
  std::optional<int> dim;
  std::optional<int> layers;
  std::optional<double> lr;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<int> eval_every;
  std::optional<double> label_smoothing;
  std::optional<uint64_t> seed;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_file, "JSON config file (flags override it)");
  cmd->add_option("--dataset-dir", f.dataset_dir, "directory with train/valid/test.txt");
  cmd->add_option("--output-dir", f.output_dir, "artifact directory");
  cmd->add_option("--encoder", f.encoder, "dualqgnn|qgnn|gcn");
  cmd->add_option("--decoder", f.decoder, "quate|distmult");
  cmd->add_option("--adjacency", f.adjacency, "weighted|binary");
  cmd->add_option("--self-loop-mode", f.self_loop, "doubled|single");
  cmd->add_option("--dim", f.dim, "coordinates per node in the encoder algebra");
  cmd->add_option("--layers", f.layers, "number of message-passing layers");
  cmd->add_option("--lr", f.lr, "Adam learning rate");
  cmd->add_option("--epochs", f.epochs, "training epochs");
  cmd->add_option("--batch-size", f.batch_size, "queries per batch");
  cmd->add_option("--eval-every", f.eval_every, "epochs between validation runs");
  cmd->add_option("--label-smoothing", f.label_smoothing, "label smoothing in [0,1)");
  cmd->add_option("--seed", f.seed, "run seed (all randomness derives from it)");
}

noge::RunConfig resolve_config(const CommonFlags& f) {
  noge::RunConfig cfg;
  if (f.config_file) cfg = noge::load_config_file(*f.config_file);
  if (f.dataset_dir) cfg.dataset_dir = *f.dataset_dir;
  if (f.output_dir) cfg.output_dir = *f.output_dir;
  if (f.encoder) cfg.encoder.kind = noge::encoder_kind_from(*f.encoder);
  if (f.decoder) cfg.decoder = noge::decoder_kind_from(*f.decoder);
  if (f.adjacency) cfg.adjacency = noge::adjacency_kind_from(*f.adjacency);
  if (f.self_loop) cfg.self_loop = noge::self_loop_mode_from(*f.self_loop);
  if (f.dim) cfg.encoder.dim = *f.dim;
  if (f.layers) cfg.encoder.num_layers = *f.layers;
  if (f.lr) cfg.train.learning_rate = *f.lr;
  if (f.epochs) cfg.train.epochs = *f.epochs;
  if (f.batch_size) cfg.train.batch_size = *f.batch_size;
  if (f.eval_every) cfg.train.eval_every = *f.eval_every;
  if (f.label_smoothing) cfg.train.label_smoothing = *f.label_smoothing;
  if (f.seed) cfg.seed = *f.seed;
  cfg.train.seed = cfg.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge graph link prediction with co-occurrence weighted "
               "graph neural encoders"};
  app.require_subcommand(1);

  CommonFlags pre_flags, train_flags, eval_flags, score_flags;
  bool dump_adjacency = false;
  bool resume = false;
  std::string eval_split = "test";
  std::string ckpt_train, ckpt_eval, ckpt_score;
  std::string q_head, q_rel, q_tail;
  int topk = 10;

  CLI::App* pre = app.add_subcommand("preprocess",
                                     "build vocabularies, encoded splits, and the "
                                     "co-occurrence adjacency");
  add_common_flags(pre, pre_flags);
  pre->add_flag("--dump-adjacency", dump_adjacency, "also write adjacency.tsv");

  CLI::App* train = app.add_subcommand("train", "train a model from preprocess artifacts");
  add_common_flags(train, train_flags);
  train->add_flag("--resume", resume, "continue from last.ckpt");

  CLI::App* eval = app.add_subcommand("eval", "filtered ranking metrics on a split");
  add_common_flags(eval, eval_flags);
  eval->add_option("--split", eval_split, "valid|test");
  eval->add_option("--checkpoint", ckpt_eval, "checkpoint path (default best.ckpt)");

  CLI::App* score = app.add_subcommand("score",
                                       "score a triple or rank completions; use ? as "
                                       "head or tail wildcard");
  add_common_flags(score, score_flags);
  score->add_option("--checkpoint", ckpt_score, "checkpoint path (default best.ckpt)");
  score->add_option("--topk", topk, "entities to list for wildcard queries");
  score->add_option("head", q_head, "head entity token or ?")->required();
  score->add_option("relation", q_rel, "relation token")->required();
  score->add_option("tail", q_tail, "tail entity token or ?")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (pre->parsed()) {
      noge::RunConfig cfg = resolve_config(pre_flags);
      cfg.dump_adjacency = cfg.dump_adjacency || dump_adjacency;
      noge::cmd_preprocess(cfg);
    } else if (train->parsed()) {
      noge::cmd_train(resolve_config(train_flags), resume);
    } else if (eval->parsed()) {
      noge::cmd_eval(resolve_config(eval_flags), ckpt_eval, eval_split);
    } else if (score->parsed()) {
      noge::cmd_score(resolve_config(score_flags), ckpt_score, q_head, q_rel, q_tail,
                      topk);
    }
  } catch (const noge::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const noge::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
