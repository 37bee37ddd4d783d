#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "noge/cooc_graph.hpp"
#include "noge/decoders.hpp"
#include "noge/encoders.hpp"
#include "noge/eval.hpp"
#include "noge/kg_data.hpp"

namespace noge {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 1024;
  int epochs = 3000;
  int eval_every = 1;         // epochs between validation evaluations
  double label_smoothing = 0.0;
  uint64_t seed = 42;
  AdamConfig adam;
};

// Encoder + decoder + dataset dimensions. The encoder parameters are the
// model's only trainables (both score functions are parameter-free).
struct Model {
  EncoderConfig encoder;
  DecoderKind decoder = DecoderKind::quate;
  int64_t entity_count = 0;
  int32_t num_relations = 0;  // inverse-augmented count

  EncoderParams params;

  int64_t node_count() const { return entity_count + num_relations; }
  int64_t relation_node(int32_t r) const { return entity_count + r; }
};

// Validates the encoder/decoder pairing (quate needs quaternion reps; gcn
// pairs with distmult) and draws initial parameters from the seed.
Model init_model(const EncoderConfig& enc, DecoderKind dec, int64_t entity_count,
                 int32_t num_relations, uint64_t seed);

// Decoder-input tensor from the encoder output: dual-quaternion reps are
// concatenated into quaternion reps of twice the width for quate; any reps
// are flattened component-major into real vectors for distmult.
Tensor decoder_input(const Model& model, const Tensor& enc_out);

// Maps a gradient w.r.t. the decoder input back onto the encoder output.
Tensor decoder_input_grad_to_encoder(const Model& model, const Tensor& grad_dreps);

// Parameter tensors in checkpoint/update order: embeddings, then each layer
// weight.
std::vector<Tensor*> param_tensors(EncoderParams& p);
std::vector<const Tensor*> param_tensors(const EncoderParams& p);

struct AdamState {
  std::vector<Tensor> m, v;  // shaped like the parameter tensors
  int64_t step = 0;
};

AdamState init_adam(const EncoderParams& params);

// Bias-corrected Adam update applied per real component. Throws
// NumericError on a non-finite gradient.
void adam_step(EncoderParams& params, const EncoderGrads& grads, AdamState& state,
               double learning_rate, const AdamConfig& adam);

struct QueryPair {
  int32_t h = 0, r = 0;
  bool operator==(const QueryPair&) const = default;
};

// One KvsAll batch: (h, r) queries plus, per query, the sorted entity ids
// whose label is 1 (all training tails of the pair); every other entity is
// an invalid triple with label 0.
struct QueryBatch {
  std::vector<QueryPair> pairs;
  std::vector<std::vector<int32_t>> tails;
};

// Distinct (h, r) pairs of the (augmented) training split, first-appearance
// order.
std::vector<QueryPair> distinct_pairs(std::span<const Triple> train);

// Shuffles pairs with the (seed, epoch) stream and partitions into chunks of
// batch_size; the last chunk may be smaller. Labels come from the
// train-split truth index.
std::vector<QueryBatch> make_batches(std::vector<QueryPair> pairs, int batch_size,
                                     uint64_t seed, int epoch,
                                     const TruthIndex& truth_train);

// Binary cross-entropy over one score row with optional label smoothing
// (l' = l (1-s) + s/n). Returns the row loss (a sum over entities) and
// writes sigmoid(f) - l' per entry into grad_out. Uses log-sigmoid forms, so
// saturated scores neither overflow nor produce infinities.
double bce_loss(std::span<const double> scores, std::span<const uint8_t> labels,
                double smoothing, std::span<double> grad_out);

// Full-batch loss (mean over rows) and, when grads_out is non-null, the
// exact gradients for every encoder parameter.
double compute_loss_and_grads(const Model& model, const QueryBatch& batch,
                              const NormalizedAdjacency& adj, double smoothing,
                              EncoderGrads* grads_out);

// One pass over all batches of the epoch: full-graph forward, all-tails
// scoring, backward, one Adam step per batch. Returns the mean per-batch
// loss.
double train_epoch(Model& model, const std::vector<QueryPair>& pairs,
                   const TruthIndex& truth_train, const NormalizedAdjacency& adj,
                   const TrainConfig& cfg, int epoch, AdamState& adam);
double train_epoch(Model& model, const Dataset& data, const NormalizedAdjacency& adj,
                   const TrainConfig& cfg, int epoch, AdamState& adam);

struct EpochLog {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  bool evaluated = false;
  double valid_mrr = 0.0;
  double valid_hits10 = 0.0;
};

// Mutable training state; everything needed to resume a run.
struct FitContext {
  AdamState adam;
  int epoch = 0;  // completed epochs
  double best_valid_mrr = -1.0;
  int best_epoch = -1;  // 1-based, -1 when no evaluation happened yet
  EncoderParams best_params;
  std::vector<EpochLog> history;
};

// Trains until cfg.epochs total epochs are completed, evaluating filtered
// validation MRR every eval_every epochs and retaining the parameters with
// the highest value (ties keep the earlier epoch). One structured line per
// epoch goes to `log_lines` when non-null.
void fit(Model& model, const Dataset& data, const NormalizedAdjacency& adj,
         const TrainConfig& cfg, FitContext& ctx, std::ostream* log_lines = nullptr);

void append_log_line(std::ostream& os, const EpochLog& l);

// Filtered metrics on a split using the current parameters (one forward).
Metrics evaluate_model(const Model& model, const Dataset& data,
                       std::span<const Triple> original_triples,
                       const TruthIndex& truth_all, const NormalizedAdjacency& adj);

struct GradCheckReport {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  int64_t params_checked = 0;
};

// Central finite differences over every parameter component against the
// analytic full-model gradient (encoder + decoder + loss) on the dataset's
// full pair set. Relative error uses max(|analytic|, |fd|, 1e-6) as the
// denominator.
GradCheckReport gradient_check(Model& model, const Dataset& data,
                               const NormalizedAdjacency& adj, double fd_step,
                               double smoothing = 0.0);

}  // namespace noge
