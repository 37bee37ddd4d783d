#include "noge/decoders.hpp"

#include <cmath>

#include "noge/errors.hpp"

namespace noge {

namespace {

// Normalizes the relation row into cache->rn / rnorm.
void normalize_relation_row(const Tensor& reps, int64_t r_node,
                            DecoderQueryCache& cache) {
  const int64_t d = reps.cols;
  cache.rnorm.assign(static_cast<size_t>(d), 0.0);
  for (int k = 0; k < 4; ++k) cache.rn[static_cast<size_t>(k)].assign(static_cast<size_t>(d), 0.0);
  const double* ra = reps.c[0].data() + r_node * d;
  const double* rb = reps.c[1].data() + r_node * d;
  const double* rc = reps.c[2].data() + r_node * d;
  const double* rd = reps.c[3].data() + r_node * d;
  for (int64_t i = 0; i < d; ++i) {
    const double n = std::sqrt(ra[i] * ra[i] + rb[i] * rb[i] + rc[i] * rc[i] +
                               rd[i] * rd[i]);
    if (n == 0.0)
      throw NumericError("quate: zero-norm relation coordinate " + std::to_string(i));
    cache.rnorm[static_cast<size_t>(i)] = n;
    cache.rn[0][static_cast<size_t>(i)] = ra[i] / n;
    cache.rn[1][static_cast<size_t>(i)] = rb[i] / n;
    cache.rn[2][static_cast<size_t>(i)] = rc[i] / n;
    cache.rn[3][static_cast<size_t>(i)] = rd[i] / n;
  }
}

// w = v_h (x) rn, coordinate-wise Hamilton products.
void hamilton_head_relation(const Tensor& reps, int64_t h_node,
                            DecoderQueryCache& cache) {
  const int64_t d = reps.cols;
  for (int k = 0; k < 4; ++k) cache.w[static_cast<size_t>(k)].assign(static_cast<size_t>(d), 0.0);
  const double* ha = reps.c[0].data() + h_node * d;
  const double* hb = reps.c[1].data() + h_node * d;
  const double* hc = reps.c[2].data() + h_node * d;
  const double* hd = reps.c[3].data() + h_node * d;
  const auto& ra = cache.rn[0];
  const auto& rb = cache.rn[1];
  const auto& rc = cache.rn[2];
  const auto& rd = cache.rn[3];
  for (int64_t i = 0; i < d; ++i) {
    const size_t s = static_cast<size_t>(i);
    cache.w[0][s] = ha[i] * ra[s] - hb[i] * rb[s] - hc[i] * rc[s] - hd[i] * rd[s];
    cache.w[1][s] = ha[i] * rb[s] + hb[i] * ra[s] + hc[i] * rd[s] - hd[i] * rc[s];
    cache.w[2][s] = ha[i] * rc[s] - hb[i] * rd[s] + hc[i] * ra[s] + hd[i] * rb[s];
    cache.w[3][s] = ha[i] * rd[s] + hb[i] * rc[s] - hc[i] * rb[s] + hd[i] * ra[s];
  }
}

double inner_with_row(const DecoderQueryCache& cache, const Tensor& reps,
                      int64_t t_node) {
  const int64_t d = reps.cols;
  const double* ta = reps.c[0].data() + t_node * d;
  const double* tb = reps.c[1].data() + t_node * d;
  const double* tc = reps.c[2].data() + t_node * d;
  const double* td = reps.c[3].data() + t_node * d;
  double s = 0.0;
  for (int64_t i = 0; i < d; ++i) {
    const size_t k = static_cast<size_t>(i);
    s += cache.w[0][k] * ta[i] + cache.w[1][k] * tb[i] + cache.w[2][k] * tc[i] +
         cache.w[3][k] * td[i];
  }
  return s;
}

void distmult_query(const Tensor& reps, int64_t h_node, int64_t r_node,
                    DecoderQueryCache& cache) {
  const int64_t d = reps.cols;
  cache.w[0].assign(static_cast<size_t>(d), 0.0);
  const double* h = reps.c[0].data() + h_node * d;
  const double* r = reps.c[0].data() + r_node * d;
  for (int64_t i = 0; i < d; ++i) cache.w[0][static_cast<size_t>(i)] = h[i] * r[i];
}

double distmult_inner_with_row(const DecoderQueryCache& cache, const Tensor& reps,
                               int64_t t_node) {
  const int64_t d = reps.cols;
  const double* t = reps.c[0].data() + t_node * d;
  double s = 0.0;
  for (int64_t i = 0; i < d; ++i) s += cache.w[0][static_cast<size_t>(i)] * t[i];
  return s;
}

}  // namespace

double quate_score(const QuatVec& v_h, const QuatVec& v_r, const QuatVec& v_t) {
  if (v_h.size() != v_r.size() || v_h.size() != v_t.size())
    throw InternalError("quate_score: shape mismatch");
  const size_t n = v_h.size();
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Quaternion rn = quat_normalize(v_r.at(i));
    const Quaternion w = hamilton(v_h.at(i), rn);
    s += quat_dot(w, v_t.at(i));
  }
  return s;
}

double distmult_score(std::span<const double> h, std::span<const double> r,
                      std::span<const double> t) {
  if (h.size() != r.size() || h.size() != t.size())
    throw InternalError("distmult_score: shape mismatch");
  double s = 0.0;
  for (size_t i = 0; i < h.size(); ++i) s += h[i] * r[i] * t[i];
  return s;
}

void score_all_tails(const Tensor& reps, int64_t h_node, int64_t r_node,
                     int64_t entity_count, DecoderKind kind, std::span<double> out,
                     DecoderQueryCache* cache) {
  DecoderQueryCache local;
  DecoderQueryCache& qc = cache ? *cache : local;
  if (kind == DecoderKind::quate) {
    normalize_relation_row(reps, r_node, qc);
    hamilton_head_relation(reps, h_node, qc);
    for (int64_t t = 0; t < entity_count; ++t)
      out[static_cast<size_t>(t)] = inner_with_row(qc, reps, t);
  } else {
    distmult_query(reps, h_node, r_node, qc);
    for (int64_t t = 0; t < entity_count; ++t)
      out[static_cast<size_t>(t)] = distmult_inner_with_row(qc, reps, t);
  }
}

double score_one(const Tensor& reps, int64_t h_node, int64_t r_node, int64_t t_node,
                 DecoderKind kind) {
  DecoderQueryCache qc;
  if (kind == DecoderKind::quate) {
    normalize_relation_row(reps, r_node, qc);
    hamilton_head_relation(reps, h_node, qc);
    return inner_with_row(qc, reps, t_node);
  }
  distmult_query(reps, h_node, r_node, qc);
  return distmult_inner_with_row(qc, reps, t_node);
}

void decoder_backward_all_tails(const Tensor& reps, int64_t h_node, int64_t r_node,
                                int64_t entity_count, DecoderKind kind,
                                std::span<const double> grad_row,
                                const DecoderQueryCache& cache, Tensor& grad_reps) {
  const int64_t d = reps.cols;
  if (kind == DecoderKind::distmult) {
    std::vector<double> gw(static_cast<size_t>(d), 0.0);
    const double* h = reps.c[0].data() + h_node * d;
    const double* r = reps.c[0].data() + r_node * d;
    double* gout = grad_reps.c[0].data();
    for (int64_t t = 0; t < entity_count; ++t) {
      const double g = grad_row[static_cast<size_t>(t)];
      if (g == 0.0) continue;
      const double* tv = reps.c[0].data() + t * d;
      double* gt = gout + t * d;
      for (int64_t i = 0; i < d; ++i) {
        gw[static_cast<size_t>(i)] += g * tv[i];
        gt[i] += g * cache.w[0][static_cast<size_t>(i)];
      }
    }
    double* gh = gout + h_node * d;
    double* gr = gout + r_node * d;
    for (int64_t i = 0; i < d; ++i) {
      gh[i] += gw[static_cast<size_t>(i)] * r[i];
      gr[i] += gw[static_cast<size_t>(i)] * h[i];
    }
    return;
  }

  // quate: score_t = sum_i w_i . t_i with w = v_h (x) rn.
  std::array<std::vector<double>, 4> gw;
  for (auto& v : gw) v.assign(static_cast<size_t>(d), 0.0);
  for (int64_t t = 0; t < entity_count; ++t) {
    const double g = grad_row[static_cast<size_t>(t)];
    if (g == 0.0) continue;
    for (int k = 0; k < 4; ++k) {
      const double* tv = reps.c[static_cast<size_t>(k)].data() + t * d;
      double* gt = grad_reps.c[static_cast<size_t>(k)].data() + t * d;
      const auto& w = cache.w[static_cast<size_t>(k)];
      auto& gwk = gw[static_cast<size_t>(k)];
      for (int64_t i = 0; i < d; ++i) {
        gwk[static_cast<size_t>(i)] += g * tv[i];
        gt[i] += g * w[static_cast<size_t>(i)];
      }
    }
  }

  const double* ha = reps.c[0].data() + h_node * d;
  const double* hb = reps.c[1].data() + h_node * d;
  const double* hc = reps.c[2].data() + h_node * d;
  const double* hd = reps.c[3].data() + h_node * d;
  double* gha = grad_reps.c[0].data() + h_node * d;
  double* ghb = grad_reps.c[1].data() + h_node * d;
  double* ghc = grad_reps.c[2].data() + h_node * d;
  double* ghd = grad_reps.c[3].data() + h_node * d;
  double* gra = grad_reps.c[0].data() + r_node * d;
  double* grb = grad_reps.c[1].data() + r_node * d;
  double* grc = grad_reps.c[2].data() + r_node * d;
  double* grd = grad_reps.c[3].data() + r_node * d;

  for (int64_t i = 0; i < d; ++i) {
    const size_t s = static_cast<size_t>(i);
    const Quaternion gwq{gw[0][s], gw[1][s], gw[2][s], gw[3][s]};
    const Quaternion rn{cache.rn[0][s], cache.rn[1][s], cache.rn[2][s], cache.rn[3][s]};
    const Quaternion hq{ha[i], hb[i], hc[i], hd[i]};
    // w = h (x) rn: gh = gw (x) rn*, grn = h* (x) gw
    const Quaternion gh = hamilton(gwq, quat_conjugate(rn));
    const Quaternion grn = hamilton(quat_conjugate(hq), gwq);
    gha[i] += gh.a; ghb[i] += gh.b; ghc[i] += gh.c; ghd[i] += gh.d;
    // rn = r / |r|: gr = (grn - rn (rn . grn)) / |r|
    const double proj = quat_dot(rn, grn);
    const double inv_n = 1.0 / cache.rnorm[s];
    gra[i] += (grn.a - rn.a * proj) * inv_n;
    grb[i] += (grn.b - rn.b * proj) * inv_n;
    grc[i] += (grn.c - rn.c * proj) * inv_n;
    grd[i] += (grn.d - rn.d * proj) * inv_n;
  }
}

const char* decoder_kind_name(DecoderKind k) {
  return k == DecoderKind::quate ? "quate" : "distmult";
}

DecoderKind decoder_kind_from(const std::string& name) {
  if (name == "quate") return DecoderKind::quate;
  if (name == "distmult") return DecoderKind::distmult;
  throw UsageError("unknown decoder kind: " + name);
}

}  // namespace noge
