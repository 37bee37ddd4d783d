#include "noge/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "noge/errors.hpp"
#include "noge/prng.hpp"

namespace noge {

namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Model init_model(const EncoderConfig& enc, DecoderKind dec, int64_t entity_count,
                 int32_t num_relations, uint64_t seed) {
  if (dec == DecoderKind::quate && enc.kind == EncoderKind::gcn)
    throw UsageError("quate decoder requires quaternion representations; "
                     "use distmult with the gcn encoder");
  Model m;
  m.encoder = enc;
  m.decoder = dec;
  m.entity_count = entity_count;
  m.num_relations = num_relations;
  m.params = init_params(enc, entity_count + num_relations, seed);
  return m;
}

Tensor decoder_input(const Model& model, const Tensor& enc_out) {
  if (model.decoder == DecoderKind::quate) {
    if (enc_out.comps == 8) return concat_dual_to_quat(enc_out);
    if (enc_out.comps == 4) return enc_out;
    throw InternalError("decoder_input: quate needs quaternion components");
  }
  // distmult: flatten component-major into real vectors.
  Tensor out(1, enc_out.rows, enc_out.comps * enc_out.cols);
  const int64_t d = enc_out.cols;
  for (int k = 0; k < enc_out.comps; ++k) {
    const auto& src = enc_out.c[static_cast<size_t>(k)];
    auto& dst = out.c[0];
    for (int64_t n = 0; n < enc_out.rows; ++n)
      for (int64_t i = 0; i < d; ++i)
        dst[static_cast<size_t>(n * out.cols + k * d + i)] =
            src[static_cast<size_t>(n * d + i)];
  }
  return out;
}

Tensor decoder_input_grad_to_encoder(const Model& model, const Tensor& grad_dreps) {
  const int comps = algebra_components(model.encoder.kind);
  if (model.decoder == DecoderKind::quate) {
    if (comps == 8) return split_quat_grad_to_dual(grad_dreps);
    return grad_dreps;
  }
  const int64_t d = grad_dreps.cols / comps;
  Tensor out(comps, grad_dreps.rows, d);
  for (int k = 0; k < comps; ++k) {
    auto& dst = out.c[static_cast<size_t>(k)];
    const auto& src = grad_dreps.c[0];
    for (int64_t n = 0; n < grad_dreps.rows; ++n)
      for (int64_t i = 0; i < d; ++i)
        dst[static_cast<size_t>(n * d + i)] =
            src[static_cast<size_t>(n * grad_dreps.cols + k * d + i)];
  }
  return out;
}

std::vector<Tensor*> param_tensors(EncoderParams& p) {
  std::vector<Tensor*> out;
  out.push_back(&p.embeddings);
  for (auto& w : p.layer_weights) out.push_back(&w);
  return out;
}

std::vector<const Tensor*> param_tensors(const EncoderParams& p) {
  std::vector<const Tensor*> out;
  out.push_back(&p.embeddings);
  for (const auto& w : p.layer_weights) out.push_back(&w);
  return out;
}

AdamState init_adam(const EncoderParams& params) {
  AdamState s;
  for (const Tensor* t : param_tensors(params)) {
    s.m.push_back(zeros_like(*t));
    s.v.push_back(zeros_like(*t));
  }
  s.step = 0;
  return s;
}

void adam_step(EncoderParams& params, const EncoderGrads& grads, AdamState& state,
               double learning_rate, const AdamConfig& adam) {
  std::vector<Tensor*> ps = param_tensors(params);
  std::vector<const Tensor*> gs;
  gs.push_back(&grads.embeddings);
  for (const auto& w : grads.layer_weights) gs.push_back(&w);
  if (ps.size() != gs.size() || ps.size() != state.m.size())
    throw InternalError("adam_step: parameter/gradient count mismatch");

  state.step += 1;
  const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(state.step));
  for (size_t ti = 0; ti < ps.size(); ++ti) {
    Tensor& p = *ps[ti];
    const Tensor& g = *gs[ti];
    if (!p.same_shape(g)) throw InternalError("adam_step: shape mismatch");
    for (int k = 0; k < p.comps; ++k) {
      auto& pv = p.c[static_cast<size_t>(k)];
      const auto& gv = g.c[static_cast<size_t>(k)];
      auto& mv = state.m[ti].c[static_cast<size_t>(k)];
      auto& vv = state.v[ti].c[static_cast<size_t>(k)];
      for (size_t i = 0; i < pv.size(); ++i) {
        const double gi = gv[i];
        if (!std::isfinite(gi))
          throw NumericError("adam_step: non-finite gradient");
        mv[i] = adam.beta1 * mv[i] + (1.0 - adam.beta1) * gi;
        vv[i] = adam.beta2 * vv[i] + (1.0 - adam.beta2) * gi * gi;
        const double mhat = mv[i] / bc1;
        const double vhat = vv[i] / bc2;
        pv[i] -= learning_rate * mhat / (std::sqrt(vhat) + adam.eps);
      }
    }
  }
}

std::vector<QueryPair> distinct_pairs(std::span<const Triple> train) {
  std::vector<QueryPair> out;
  std::unordered_set<uint64_t> seen;
  out.reserve(train.size());
  for (const Triple& t : train) {
    const uint64_t k = TruthIndex::key(t.h, t.r);
    if (seen.insert(k).second) out.push_back({t.h, t.r});
  }
  return out;
}

std::vector<QueryBatch> make_batches(std::vector<QueryPair> pairs, int batch_size,
                                     uint64_t seed, int epoch,
                                     const TruthIndex& truth_train) {
  Rng rng(seed, "batches", {static_cast<uint64_t>(epoch)});
  rng.shuffle(pairs);
  std::vector<QueryBatch> out;
  for (size_t off = 0; off < pairs.size(); off += static_cast<size_t>(batch_size)) {
    QueryBatch b;
    const size_t end = std::min(pairs.size(), off + static_cast<size_t>(batch_size));
    for (size_t i = off; i < end; ++i) {
      const QueryPair q = pairs[i];
      b.pairs.push_back(q);
      const auto tails = truth_train.tails(q.h, q.r);
      b.tails.emplace_back(tails.begin(), tails.end());
    }
    out.push_back(std::move(b));
  }
  return out;
}

double bce_loss(std::span<const double> scores, std::span<const uint8_t> labels,
                double smoothing, std::span<double> grad_out) {
  const size_t n = scores.size();
  const double base = smoothing / static_cast<double>(n);
  double loss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double f = scores[i];
    const double lp = labels[i] ? (1.0 - smoothing) + base : base;
    loss += lp * softplus(-f) + (1.0 - lp) * softplus(f);
    grad_out[i] = sigmoid(f) - lp;
  }
  return loss;
}

double compute_loss_and_grads(const Model& model, const QueryBatch& batch,
                              const NormalizedAdjacency& adj, double smoothing,
                              EncoderGrads* grads_out) {
  ForwardCache cache;
  const Tensor enc_out =
      encoder_forward(model.params, adj, grads_out ? &cache : nullptr);
  const Tensor dreps = decoder_input(model, enc_out);
  const int64_t entities = model.entity_count;
  const size_t batch_rows = batch.pairs.size();

  std::vector<double> row(static_cast<size_t>(entities));
  std::vector<double> grow(static_cast<size_t>(entities));
  std::vector<uint8_t> labels(static_cast<size_t>(entities), 0);
  Tensor grad_dreps = grads_out ? zeros_like(dreps) : Tensor();
  DecoderQueryCache qc;

  double total = 0.0;
  for (size_t i = 0; i < batch_rows; ++i) {
    const QueryPair q = batch.pairs[i];
    score_all_tails(dreps, q.h, model.relation_node(q.r), entities, model.decoder,
                    row, &qc);
    for (int32_t t : batch.tails[i]) labels[static_cast<size_t>(t)] = 1;
    total += bce_loss(row, labels, smoothing, grow);
    for (int32_t t : batch.tails[i]) labels[static_cast<size_t>(t)] = 0;
    if (grads_out) {
      const double inv_b = 1.0 / static_cast<double>(batch_rows);
      for (double& g : grow) g *= inv_b;
      decoder_backward_all_tails(dreps, q.h, model.relation_node(q.r), entities,
                                 model.decoder, grow, qc, grad_dreps);
    }
  }
  total /= static_cast<double>(batch_rows);
  if (grads_out) {
    const Tensor grad_enc = decoder_input_grad_to_encoder(model, grad_dreps);
    *grads_out = encoder_backward(grad_enc, cache, model.params, adj);
  }
  return total;
}

double train_epoch(Model& model, const std::vector<QueryPair>& pairs,
                   const TruthIndex& truth_train, const NormalizedAdjacency& adj,
                   const TrainConfig& cfg, int epoch, AdamState& adam) {
  const auto batches = make_batches(pairs, cfg.batch_size, cfg.seed, epoch, truth_train);
  double sum = 0.0;
  for (const QueryBatch& b : batches) {
    EncoderGrads grads;
    sum += compute_loss_and_grads(model, b, adj, cfg.label_smoothing, &grads);
    adam_step(model.params, grads, adam, cfg.learning_rate, cfg.adam);
  }
  return batches.empty() ? 0.0 : sum / static_cast<double>(batches.size());
}

double train_epoch(Model& model, const Dataset& data, const NormalizedAdjacency& adj,
                   const TrainConfig& cfg, int epoch, AdamState& adam) {
  const TruthIndex truth_train = build_truth_index(data, kTrainSplit);
  return train_epoch(model, distinct_pairs(data.train), truth_train, adj, cfg, epoch,
                     adam);
}

Metrics evaluate_model(const Model& model, const Dataset& data,
                       std::span<const Triple> original_triples,
                       const TruthIndex& truth_all, const NormalizedAdjacency& adj) {
  if (!data.inverse_augmented)
    throw UsageError("evaluation answers head queries through inverse relations; "
                     "the dataset must be inverse-augmented");
  const Tensor enc_out = encoder_forward(model.params, adj, nullptr);
  const Tensor dreps = decoder_input(model, enc_out);
  return evaluate_split(dreps, model.decoder, original_triples, truth_all,
                        model.entity_count, data.vocab.relation_count());
}

void append_log_line(std::ostream& os, const EpochLog& l) {
  char buf[256];
  if (l.evaluated) {
    std::snprintf(buf, sizeof(buf),
                  "{\"epoch\":%d,\"loss\":%.17g,\"valid_mrr\":%.17g,"
                  "\"valid_hits10\":%.17g}\n",
                  l.epoch, l.loss, l.valid_mrr, l.valid_hits10);
  } else {
    std::snprintf(buf, sizeof(buf), "{\"epoch\":%d,\"loss\":%.17g}\n", l.epoch,
                  l.loss);
  }
  os << buf;
}

void fit(Model& model, const Dataset& data, const NormalizedAdjacency& adj,
         const TrainConfig& cfg, FitContext& ctx, std::ostream* log_lines) {
  const std::vector<Triple> valid_originals = data.original_triples(data.valid);
  if (cfg.epochs > ctx.epoch && valid_originals.empty())
    throw DataError("fit: validation split is empty");

  const std::vector<QueryPair> pairs = distinct_pairs(data.train);
  const TruthIndex truth_train = build_truth_index(data, kTrainSplit);
  const TruthIndex truth_all = build_truth_index(data, kAllSplits);
  if (ctx.adam.m.empty()) ctx.adam = init_adam(model.params);

  while (ctx.epoch < cfg.epochs) {
    const int epoch = ctx.epoch;  // 0-based for the batch stream
    const double loss =
        train_epoch(model, pairs, truth_train, adj, cfg, epoch, ctx.adam);
    EpochLog log;
    log.epoch = epoch + 1;
    log.loss = loss;
    if (cfg.eval_every > 0 && (epoch + 1) % cfg.eval_every == 0) {
      const Metrics m = evaluate_model(model, data, valid_originals, truth_all, adj);
      log.evaluated = true;
      log.valid_mrr = m.mrr;
      log.valid_hits10 = m.hits10;
      if (m.mrr > ctx.best_valid_mrr) {
        ctx.best_valid_mrr = m.mrr;
        ctx.best_epoch = log.epoch;
        ctx.best_params = model.params;
      }
    }
    ctx.history.push_back(log);
    if (log_lines) append_log_line(*log_lines, log);
    ctx.epoch += 1;
  }
}

GradCheckReport gradient_check(Model& model, const Dataset& data,
                               const NormalizedAdjacency& adj, double fd_step,
                               double smoothing) {
  const TruthIndex truth_train = build_truth_index(data, kTrainSplit);
  QueryBatch batch;
  for (const QueryPair& q : distinct_pairs(data.train)) {
    batch.pairs.push_back(q);
    const auto tails = truth_train.tails(q.h, q.r);
    batch.tails.emplace_back(tails.begin(), tails.end());
  }

  EncoderGrads grads;
  compute_loss_and_grads(model, batch, adj, smoothing, &grads);
  std::vector<const Tensor*> gs;
  gs.push_back(&grads.embeddings);
  for (const auto& w : grads.layer_weights) gs.push_back(&w);

  GradCheckReport report;
  std::vector<Tensor*> ps = param_tensors(model.params);
  for (size_t ti = 0; ti < ps.size(); ++ti) {
    Tensor& p = *ps[ti];
    for (int64_t k = 0; k < p.flat_count(); ++k) {
      p.add_flat(k, fd_step);
      const double lp = compute_loss_and_grads(model, batch, adj, smoothing, nullptr);
      p.add_flat(k, -2.0 * fd_step);
      const double lm = compute_loss_and_grads(model, batch, adj, smoothing, nullptr);
      p.add_flat(k, fd_step);
      const double fd = (lp - lm) / (2.0 * fd_step);
      const double an = gs[ti]->get_flat(k);
      const double abs_err = std::abs(an - fd);
      const double rel = abs_err / std::max({std::abs(an), std::abs(fd), 1e-6});
      report.max_abs_err = std::max(report.max_abs_err, abs_err);
      report.max_rel_err = std::max(report.max_rel_err, rel);
      report.params_checked += 1;
    }
  }
  return report;
}

}  // namespace noge
