#include "noge/encoders.hpp"

#include <cmath>

#include "noge/errors.hpp"
#include "noge/hypercomplex.hpp"
#include "noge/prng.hpp"

namespace noge {

namespace {

// y[n] += W (*) x[n] in the encoder's algebra.
void transform_acc(EncoderKind kind, const Tensor& W, const Tensor& X, Tensor& Y) {
  switch (kind) {
    case EncoderKind::gcn:
      rmatmul_acc(W, 0, X, 0, Y, 0);
      break;
    case EncoderKind::qgnn:
      qmatmul_acc(W, 0, X, 0, Y, 0);
      break;
    case EncoderKind::dualqgnn:
      // zq = Wq x xq ; zp = Wq x xp + Wp x xq
      qmatmul_acc(W, 0, X, 0, Y, 0);
      qmatmul_acc(W, 0, X, 4, Y, 4);
      qmatmul_acc(W, 4, X, 0, Y, 4);
      break;
  }
}

void transform_back_input_acc(EncoderKind kind, const Tensor& W, const Tensor& G,
                              Tensor& GX) {
  switch (kind) {
    case EncoderKind::gcn:
      rmatmul_t_acc(W, 0, G, 0, GX, 0);
      break;
    case EncoderKind::qgnn:
      qmatmul_conj_w_acc(W, 0, G, 0, GX, 0);
      break;
    case EncoderKind::dualqgnn:
      qmatmul_conj_w_acc(W, 0, G, 0, GX, 0);
      qmatmul_conj_w_acc(W, 4, G, 4, GX, 0);
      qmatmul_conj_w_acc(W, 0, G, 4, GX, 4);
      break;
  }
}

void transform_back_weight_acc(EncoderKind kind, const Tensor& G, const Tensor& X,
                               Tensor& GW) {
  switch (kind) {
    case EncoderKind::gcn:
      rmatmul_grad_w_acc(G, 0, X, 0, GW, 0);
      break;
    case EncoderKind::qgnn:
      qmatmul_grad_w_acc(G, 0, X, 0, GW, 0);
      break;
    case EncoderKind::dualqgnn:
      qmatmul_grad_w_acc(G, 0, X, 0, GW, 0);
      qmatmul_grad_w_acc(G, 4, X, 4, GW, 0);
      qmatmul_grad_w_acc(G, 4, X, 0, GW, 4);
      break;
  }
}

// Z[v] += sum_u a[v,u] T[u], component-wise over the sparse rows.
void aggregate(const SparseMatrix& A, const Tensor& T, Tensor& Z) {
  const int64_t d = T.cols;
  for (int k = 0; k < T.comps; ++k) {
    const double* t = T.c[static_cast<size_t>(k)].data();
    double* z = Z.c[static_cast<size_t>(k)].data();
    for (int64_t v = 0; v < A.dim; ++v) {
      double* zv = z + v * d;
      for (int64_t e = A.row_ptr[v]; e < A.row_ptr[v + 1]; ++e) {
        const double a = A.val[static_cast<size_t>(e)];
        const double* tu = t + static_cast<int64_t>(A.col[static_cast<size_t>(e)]) * d;
        for (int64_t i = 0; i < d; ++i) zv[i] += a * tu[i];
      }
    }
  }
}

// GT[u] += sum_v a[v,u] GZ[v]: the transpose of the coefficient pattern.
void aggregate_transpose(const SparseMatrix& A, const Tensor& GZ, Tensor& GT) {
  const int64_t d = GZ.cols;
  for (int k = 0; k < GZ.comps; ++k) {
    const double* gz = GZ.c[static_cast<size_t>(k)].data();
    double* gt = GT.c[static_cast<size_t>(k)].data();
    for (int64_t v = 0; v < A.dim; ++v) {
      const double* gzv = gz + v * d;
      for (int64_t e = A.row_ptr[v]; e < A.row_ptr[v + 1]; ++e) {
        const double a = A.val[static_cast<size_t>(e)];
        double* gtu = gt + static_cast<int64_t>(A.col[static_cast<size_t>(e)]) * d;
        for (int64_t i = 0; i < d; ++i) gtu[i] += a * gzv[i];
      }
    }
  }
}

}  // namespace

EncoderParams init_params(const EncoderConfig& config, int64_t node_count,
                          uint64_t seed) {
  const int comps = algebra_components(config.kind);
  EncoderParams p;
  p.config = config;
  p.node_count = node_count;
  p.embeddings = Tensor(comps, node_count, config.dim);
  const double s = std::sqrt(6.0 / (config.dim + config.dim));
  for (int k = 0; k < comps; ++k) {
    Rng rng(seed, "embeddings", {static_cast<uint64_t>(k)});
    for (auto& v : p.embeddings.c[static_cast<size_t>(k)]) v = rng.uniform(-s, s);
  }
  p.layer_weights.reserve(static_cast<size_t>(config.num_layers));
  for (int l = 0; l < config.num_layers; ++l) {
    Tensor w(comps, config.dim, config.dim);
    for (int k = 0; k < comps; ++k) {
      Rng rng(seed, "layer_weight", {static_cast<uint64_t>(l), static_cast<uint64_t>(k)});
      for (auto& v : w.c[static_cast<size_t>(k)]) v = rng.uniform(-s, s);
    }
    p.layer_weights.push_back(std::move(w));
  }
  return p;
}

Tensor encoder_forward(const EncoderParams& params, const NormalizedAdjacency& adj,
                       ForwardCache* cache) {
  const EncoderConfig& cfg = params.config;
  const int comps = algebra_components(cfg.kind);
  if (adj.m.dim != params.node_count)
    throw InternalError("encoder_forward: adjacency dimension != node count");
  if (cache) {
    cache->pre_act.clear();
    cache->post_act.clear();
  }
  Tensor x = params.embeddings;
  for (int l = 0; l < cfg.num_layers; ++l) {
    Tensor t(comps, params.node_count, cfg.dim);
    transform_acc(cfg.kind, params.layer_weights[static_cast<size_t>(l)], x, t);
    Tensor z(comps, params.node_count, cfg.dim);
    aggregate(adj.m, t, z);
    if (!all_finite(z))
      throw NumericError("encoder_forward: non-finite activation at layer " +
                         std::to_string(l));
    Tensor y = zeros_like(z);
    for (int k = 0; k < comps; ++k) {
      const auto& zs = z.c[static_cast<size_t>(k)];
      auto& ys = y.c[static_cast<size_t>(k)];
      for (size_t i = 0; i < zs.size(); ++i) ys[i] = std::tanh(zs[i]);
    }
    if (cache) {
      cache->pre_act.push_back(std::move(z));
      cache->post_act.push_back(y);
    }
    x = std::move(y);
  }
  return x;
}

EncoderGrads encoder_backward(const Tensor& grad_final, const ForwardCache& cache,
                              const EncoderParams& params,
                              const NormalizedAdjacency& adj) {
  const EncoderConfig& cfg = params.config;
  const int comps = algebra_components(cfg.kind);
  if (static_cast<int>(cache.post_act.size()) != cfg.num_layers)
    throw InternalError("encoder_backward: cache depth != num_layers");
  if (!grad_final.same_shape(cfg.num_layers > 0 ? cache.post_act.back()
                                                : params.embeddings))
    throw InternalError("encoder_backward: gradient shape mismatch");

  EncoderGrads grads;
  grads.embeddings = zeros_like(params.embeddings);
  grads.layer_weights.reserve(params.layer_weights.size());
  for (const Tensor& w : params.layer_weights) grads.layer_weights.push_back(zeros_like(w));

  Tensor gy = grad_final;
  for (int l = cfg.num_layers - 1; l >= 0; --l) {
    const Tensor& y = cache.post_act[static_cast<size_t>(l)];
    // tanh backward via cached post-activation: dz = dy * (1 - y^2)
    Tensor gz = zeros_like(y);
    for (int k = 0; k < comps; ++k) {
      const auto& ys = y.c[static_cast<size_t>(k)];
      const auto& gys = gy.c[static_cast<size_t>(k)];
      auto& gzs = gz.c[static_cast<size_t>(k)];
      for (size_t i = 0; i < ys.size(); ++i) gzs[i] = gys[i] * (1.0 - ys[i] * ys[i]);
    }
    Tensor gt(comps, params.node_count, cfg.dim);
    aggregate_transpose(adj.m, gz, gt);
    const Tensor& x =
        (l == 0) ? params.embeddings : cache.post_act[static_cast<size_t>(l - 1)];
    transform_back_weight_acc(cfg.kind, gt, x, grads.layer_weights[static_cast<size_t>(l)]);
    Tensor gx(comps, params.node_count, cfg.dim);
    transform_back_input_acc(cfg.kind, params.layer_weights[static_cast<size_t>(l)], gt, gx);
    gy = std::move(gx);
  }
  grads.embeddings = std::move(gy);
  return grads;
}

Tensor concat_dual_to_quat(const Tensor& dq_reps) {
  if (dq_reps.comps != 8) throw InternalError("concat_dual_to_quat: want 8 components");
  const int64_t n = dq_reps.rows, d = dq_reps.cols;
  Tensor out(4, n, 2 * d);
  for (int k = 0; k < 4; ++k) {
    const auto& q = dq_reps.c[static_cast<size_t>(k)];
    const auto& p = dq_reps.c[static_cast<size_t>(k + 4)];
    auto& o = out.c[static_cast<size_t>(k)];
    for (int64_t row = 0; row < n; ++row) {
      for (int64_t i = 0; i < d; ++i) {
        o[static_cast<size_t>(row * 2 * d + i)] = q[static_cast<size_t>(row * d + i)];
        o[static_cast<size_t>(row * 2 * d + d + i)] = p[static_cast<size_t>(row * d + i)];
      }
    }
  }
  return out;
}

Tensor split_quat_grad_to_dual(const Tensor& quat_grad) {
  if (quat_grad.comps != 4 || quat_grad.cols % 2 != 0)
    throw InternalError("split_quat_grad_to_dual: want 4 components, even width");
  const int64_t n = quat_grad.rows, d = quat_grad.cols / 2;
  Tensor out(8, n, d);
  for (int k = 0; k < 4; ++k) {
    const auto& g = quat_grad.c[static_cast<size_t>(k)];
    auto& q = out.c[static_cast<size_t>(k)];
    auto& p = out.c[static_cast<size_t>(k + 4)];
    for (int64_t row = 0; row < n; ++row) {
      for (int64_t i = 0; i < d; ++i) {
        q[static_cast<size_t>(row * d + i)] = g[static_cast<size_t>(row * 2 * d + i)];
        p[static_cast<size_t>(row * d + i)] = g[static_cast<size_t>(row * 2 * d + d + i)];
      }
    }
  }
  return out;
}

const char* encoder_kind_name(EncoderKind k) {
  switch (k) {
    case EncoderKind::dualqgnn: return "dualqgnn";
    case EncoderKind::qgnn: return "qgnn";
    case EncoderKind::gcn: return "gcn";
  }
  return "?";
}

EncoderKind encoder_kind_from(const std::string& name) {
  if (name == "dualqgnn") return EncoderKind::dualqgnn;
  if (name == "qgnn") return EncoderKind::qgnn;
  if (name == "gcn") return EncoderKind::gcn;
  throw UsageError("unknown encoder kind: " + name);
}

}  // namespace noge
