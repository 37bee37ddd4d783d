#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "noge/tensor.hpp"

namespace noge {

struct Quaternion {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;  // a + bi + cj + dk
};

// h = q + eps * p with eps^2 = 0. The representation has no slot for an
// eps^2 term, so the truncation is structural.
struct DualQuaternion {
  Quaternion q;  // real part
  Quaternion p;  // dual part
};

struct DualNumber {
  double real = 0.0;
  double dual = 0.0;
};

Quaternion hamilton(const Quaternion& x, const Quaternion& y);
Quaternion quat_conjugate(const Quaternion& x);
double quat_dot(const Quaternion& x, const Quaternion& y);
double quat_norm(const Quaternion& x);
Quaternion quat_normalize(const Quaternion& x);  // throws NumericError on zero norm
Quaternion quat_add(const Quaternion& x, const Quaternion& y);
Quaternion quat_scale(const Quaternion& x, double s);

DualQuaternion dq_add(const DualQuaternion& h1, const DualQuaternion& h2);
DualQuaternion dq_multiply(const DualQuaternion& h1, const DualQuaternion& h2);
DualQuaternion dq_conjugate(const DualQuaternion& h);
DualNumber dq_norm(const DualQuaternion& h);            // throws NumericError when ||q|| = 0
DualQuaternion dq_normalize(const DualQuaternion& h);   // throws NumericError when ||q|| = 0

// SoA quaternion vector: coordinate i is (a[i], b[i], c[i], d[i]).
struct QuatVec {
  std::vector<double> a, b, c, d;

  QuatVec() = default;
  explicit QuatVec(size_t n) : a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0) {}

  size_t size() const { return a.size(); }
  Quaternion at(size_t i) const { return {a[i], b[i], c[i], d[i]}; }
  void set(size_t i, const Quaternion& q) {
    a[i] = q.a; b[i] = q.b; c[i] = q.c; d[i] = q.d;
  }
};

struct DualQuatVec {
  QuatVec q, p;

  DualQuatVec() = default;
  explicit DualQuatVec(size_t n) : q(n), p(n) {}

  size_t size() const { return q.size(); }
  DualQuaternion at(size_t i) const { return {q.at(i), p.at(i)}; }
  void set(size_t i, const DualQuaternion& h) { q.set(i, h.q); p.set(i, h.p); }
};

// SoA quaternion matrix, row-major rows x cols.
struct QuatMat {
  int64_t rows = 0, cols = 0;
  std::vector<double> a, b, c, d;

  QuatMat() = default;
  QuatMat(int64_t r, int64_t cl)
      : rows(r), cols(cl),
        a(static_cast<size_t>(r * cl), 0.0), b(static_cast<size_t>(r * cl), 0.0),
        c(static_cast<size_t>(r * cl), 0.0), d(static_cast<size_t>(r * cl), 0.0) {}

  Quaternion at(int64_t i, int64_t j) const {
    const size_t k = static_cast<size_t>(i * cols + j);
    return {a[k], b[k], c[k], d[k]};
  }
  void set(int64_t i, int64_t j, const Quaternion& q) {
    const size_t k = static_cast<size_t>(i * cols + j);
    a[k] = q.a; b[k] = q.b; c[k] = q.c; d[k] = q.d;
  }
};

struct DualQuatMat {
  QuatMat wq, wp;
};

// y_i = sum_j W[i,j] (x) x_j. Throws on shape mismatch.
QuatVec quat_matvec(const QuatMat& W, const QuatVec& x);

// (Wq (x) xq) + eps (Wq (x) xp + Wp (x) xq), each term a quat_matvec.
DualQuatVec dq_matvec(const DualQuatMat& W, const DualQuatVec& x);

// Sum over coordinates of the 4-component dot products; a real scalar.
double quat_inner(const QuatVec& x, const QuatVec& y);

// ---------------------------------------------------------------------------
// Batched kernels on component tensors, used by the encoders. All operate on
// a 4-component quaternion block starting at component offset wc/xc/yc, which
// lets the dual-quaternion layer reuse them on the q and p halves of an
// 8-component tensor.
// ---------------------------------------------------------------------------

// Y[n,i] += sum_j W[i,j] (x) X[n,j]   (Hamilton product per entry)
void qmatmul_acc(const Tensor& W, int wc, const Tensor& X, int xc, Tensor& Y, int yc);

// GX[n,j] += sum_i conj(W[i,j]) (x) G[n,i]   (reverse-mode through qmatmul_acc
// w.r.t. X; uses gx = w* (x) gz)
void qmatmul_conj_w_acc(const Tensor& W, int wc, const Tensor& G, int gc,
                        Tensor& GX, int xc);

// GW[i,j] += sum_n G[n,i] (x) conj(X[n,j])   (reverse-mode w.r.t. W; uses
// gw = gz (x) x*)
void qmatmul_grad_w_acc(const Tensor& G, int gc, const Tensor& X, int xc,
                        Tensor& GW, int wc);

// Real 1-component analogues.
void rmatmul_acc(const Tensor& W, int wc, const Tensor& X, int xc, Tensor& Y, int yc);
void rmatmul_t_acc(const Tensor& W, int wc, const Tensor& G, int gc, Tensor& GX, int xc);
void rmatmul_grad_w_acc(const Tensor& G, int gc, const Tensor& X, int xc,
                        Tensor& GW, int wc);

}  // namespace noge
