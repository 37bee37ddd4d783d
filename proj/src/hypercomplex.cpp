#include "noge/hypercomplex.hpp"

#include <cmath>

#include "noge/errors.hpp"

namespace noge {

Quaternion hamilton(const Quaternion& x, const Quaternion& y) {
  return {
      x.a * y.a - x.b * y.b - x.c * y.c - x.d * y.d,
      x.a * y.b + x.b * y.a + x.c * y.d - x.d * y.c,
      x.a * y.c - x.b * y.d + x.c * y.a + x.d * y.b,
      x.a * y.d + x.b * y.c - x.c * y.b + x.d * y.a,
  };
}

Quaternion quat_conjugate(const Quaternion& x) { return {x.a, -x.b, -x.c, -x.d}; }

double quat_dot(const Quaternion& x, const Quaternion& y) {
  return x.a * y.a + x.b * y.b + x.c * y.c + x.d * y.d;
}

double quat_norm(const Quaternion& x) { return std::sqrt(quat_dot(x, x)); }

Quaternion quat_normalize(const Quaternion& x) {
  const double n = quat_norm(x);
  if (n == 0.0) throw NumericError("quat_normalize: zero-norm quaternion");
  return {x.a / n, x.b / n, x.c / n, x.d / n};
}

Quaternion quat_add(const Quaternion& x, const Quaternion& y) {
  return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}

Quaternion quat_scale(const Quaternion& x, double s) {
  return {x.a * s, x.b * s, x.c * s, x.d * s};
}

DualQuaternion dq_add(const DualQuaternion& h1, const DualQuaternion& h2) {
  return {quat_add(h1.q, h2.q), quat_add(h1.p, h2.p)};
}

DualQuaternion dq_multiply(const DualQuaternion& h1, const DualQuaternion& h2) {
  return {hamilton(h1.q, h2.q),
          quat_add(hamilton(h1.q, h2.p), hamilton(h1.p, h2.q))};
}

DualQuaternion dq_conjugate(const DualQuaternion& h) {
  return {quat_conjugate(h.q), quat_conjugate(h.p)};
}

DualNumber dq_norm(const DualQuaternion& h) {
  const double nq = quat_norm(h.q);
  if (nq == 0.0) throw NumericError("dq_norm: real part has zero norm");
  return {nq, quat_dot(h.q, h.p) / nq};
}

DualQuaternion dq_normalize(const DualQuaternion& h) {
  const double nq = quat_norm(h.q);
  if (nq == 0.0) throw NumericError("dq_normalize: real part has zero norm");
  const Quaternion qn = quat_scale(h.q, 1.0 / nq);
  const double dot = quat_dot(h.q, h.p);
  const Quaternion dual =
      quat_add(quat_scale(h.p, 1.0 / nq), quat_scale(qn, -dot / (nq * nq)));
  return {qn, dual};
}

QuatVec quat_matvec(const QuatMat& W, const QuatVec& x) {
  if (W.cols != static_cast<int64_t>(x.size()))
    throw InternalError("quat_matvec: shape mismatch");
  QuatVec y(static_cast<size_t>(W.rows));
  for (int64_t i = 0; i < W.rows; ++i) {
    Quaternion acc;
    for (int64_t j = 0; j < W.cols; ++j) {
      acc = quat_add(acc, hamilton(W.at(i, j), x.at(static_cast<size_t>(j))));
    }
    y.set(static_cast<size_t>(i), acc);
  }
  return y;
}

DualQuatVec dq_matvec(const DualQuatMat& W, const DualQuatVec& x) {
  if (W.wq.cols != static_cast<int64_t>(x.size()))
    throw InternalError("dq_matvec: shape mismatch");
  DualQuatVec y(static_cast<size_t>(W.wq.rows));
  y.q = quat_matvec(W.wq, x.q);
  QuatVec t1 = quat_matvec(W.wq, x.p);
  QuatVec t2 = quat_matvec(W.wp, x.q);
  for (size_t i = 0; i < y.size(); ++i) {
    y.p.set(i, quat_add(t1.at(i), t2.at(i)));
  }
  return y;
}

double quat_inner(const QuatVec& x, const QuatVec& y) {
  if (x.size() != y.size()) throw InternalError("quat_inner: shape mismatch");
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    s += x.a[i] * y.a[i] + x.b[i] * y.b[i] + x.c[i] * y.c[i] + x.d[i] * y.d[i];
  }
  return s;
}

// --------------------------------------------------------------------------
// Batched tensor kernels.
// --------------------------------------------------------------------------

void qmatmul_acc(const Tensor& W, int wc, const Tensor& X, int xc, Tensor& Y, int yc) {
  const int64_t n_rows = X.rows, din = X.cols, dout = W.rows;
  const double* Wa = W.c[wc + 0].data();
  const double* Wb = W.c[wc + 1].data();
  const double* Wc = W.c[wc + 2].data();
  const double* Wd = W.c[wc + 3].data();
  for (int64_t n = 0; n < n_rows; ++n) {
    const double* xa = X.c[xc + 0].data() + n * din;
    const double* xb = X.c[xc + 1].data() + n * din;
    const double* xcp = X.c[xc + 2].data() + n * din;
    const double* xd = X.c[xc + 3].data() + n * din;
    double* ya = Y.c[yc + 0].data() + n * dout;
    double* yb = Y.c[yc + 1].data() + n * dout;
    double* ycp = Y.c[yc + 2].data() + n * dout;
    double* yd = Y.c[yc + 3].data() + n * dout;
    for (int64_t i = 0; i < dout; ++i) {
      const double* wa = Wa + i * din;
      const double* wb = Wb + i * din;
      const double* wcp = Wc + i * din;
      const double* wd = Wd + i * din;
      double sa = 0, sb = 0, sc = 0, sd = 0;
      for (int64_t j = 0; j < din; ++j) {
        sa += wa[j] * xa[j] - wb[j] * xb[j] - wcp[j] * xcp[j] - wd[j] * xd[j];
        sb += wa[j] * xb[j] + wb[j] * xa[j] + wcp[j] * xd[j] - wd[j] * xcp[j];
        sc += wa[j] * xcp[j] - wb[j] * xd[j] + wcp[j] * xa[j] + wd[j] * xb[j];
        sd += wa[j] * xd[j] + wb[j] * xcp[j] - wcp[j] * xb[j] + wd[j] * xa[j];
      }
      ya[i] += sa;
      yb[i] += sb;
      ycp[i] += sc;
      yd[i] += sd;
    }
  }
}

void qmatmul_conj_w_acc(const Tensor& W, int wc, const Tensor& G, int gc,
                        Tensor& GX, int xc) {
  const int64_t n_rows = G.rows, dout = W.rows, din = W.cols;
  const double* Wa = W.c[wc + 0].data();
  const double* Wb = W.c[wc + 1].data();
  const double* Wc = W.c[wc + 2].data();
  const double* Wd = W.c[wc + 3].data();
  for (int64_t n = 0; n < n_rows; ++n) {
    const double* ga = G.c[gc + 0].data() + n * dout;
    const double* gb = G.c[gc + 1].data() + n * dout;
    const double* gcp = G.c[gc + 2].data() + n * dout;
    const double* gd = G.c[gc + 3].data() + n * dout;
    double* oa = GX.c[xc + 0].data() + n * din;
    double* ob = GX.c[xc + 1].data() + n * din;
    double* oc = GX.c[xc + 2].data() + n * din;
    double* od = GX.c[xc + 3].data() + n * din;
    for (int64_t i = 0; i < dout; ++i) {
      const double* wa = Wa + i * din;
      const double* wb = Wb + i * din;
      const double* wcp = Wc + i * din;
      const double* wd = Wd + i * din;
      const double va = ga[i], vb = gb[i], vc = gcp[i], vd = gd[i];
      for (int64_t j = 0; j < din; ++j) {
        // conj(w) (x) g
        oa[j] += wa[j] * va + wb[j] * vb + wcp[j] * vc + wd[j] * vd;
        ob[j] += wa[j] * vb - wb[j] * va - wcp[j] * vd + wd[j] * vc;
        oc[j] += wa[j] * vc + wb[j] * vd - wcp[j] * va - wd[j] * vb;
        od[j] += wa[j] * vd - wb[j] * vc + wcp[j] * vb - wd[j] * va;
      }
    }
  }
}

void qmatmul_grad_w_acc(const Tensor& G, int gc, const Tensor& X, int xc,
                        Tensor& GW, int wc) {
  const int64_t n_rows = G.rows, dout = G.cols, din = X.cols;
  for (int64_t n = 0; n < n_rows; ++n) {
    const double* ga = G.c[gc + 0].data() + n * dout;
    const double* gb = G.c[gc + 1].data() + n * dout;
    const double* gcp = G.c[gc + 2].data() + n * dout;
    const double* gd = G.c[gc + 3].data() + n * dout;
    const double* xa = X.c[xc + 0].data() + n * din;
    const double* xb = X.c[xc + 1].data() + n * din;
    const double* xcp = X.c[xc + 2].data() + n * din;
    const double* xd = X.c[xc + 3].data() + n * din;
    for (int64_t i = 0; i < dout; ++i) {
      double* oa = GW.c[wc + 0].data() + i * din;
      double* ob = GW.c[wc + 1].data() + i * din;
      double* oc = GW.c[wc + 2].data() + i * din;
      double* od = GW.c[wc + 3].data() + i * din;
      const double va = ga[i], vb = gb[i], vc = gcp[i], vd = gd[i];
      for (int64_t j = 0; j < din; ++j) {
        // g (x) conj(x)
        oa[j] += va * xa[j] + vb * xb[j] + vc * xcp[j] + vd * xd[j];
        ob[j] += -va * xb[j] + vb * xa[j] - vc * xd[j] + vd * xcp[j];
        oc[j] += -va * xcp[j] + vb * xd[j] + vc * xa[j] - vd * xb[j];
        od[j] += -va * xd[j] - vb * xcp[j] + vc * xb[j] + vd * xa[j];
      }
    }
  }
}

void rmatmul_acc(const Tensor& W, int wc, const Tensor& X, int xc, Tensor& Y, int yc) {
  const int64_t n_rows = X.rows, din = X.cols, dout = W.rows;
  const double* Wv = W.c[wc].data();
  for (int64_t n = 0; n < n_rows; ++n) {
    const double* x = X.c[xc].data() + n * din;
    double* y = Y.c[yc].data() + n * dout;
    for (int64_t i = 0; i < dout; ++i) {
      const double* w = Wv + i * din;
      double s = 0;
      for (int64_t j = 0; j < din; ++j) s += w[j] * x[j];
      y[i] += s;
    }
  }
}

void rmatmul_t_acc(const Tensor& W, int wc, const Tensor& G, int gc, Tensor& GX, int xc) {
  const int64_t n_rows = G.rows, dout = W.rows, din = W.cols;
  const double* Wv = W.c[wc].data();
  for (int64_t n = 0; n < n_rows; ++n) {
    const double* g = G.c[gc].data() + n * dout;
    double* o = GX.c[xc].data() + n * din;
    for (int64_t i = 0; i < dout; ++i) {
      const double* w = Wv + i * din;
      const double v = g[i];
      for (int64_t j = 0; j < din; ++j) o[j] += w[j] * v;
    }
  }
}

void rmatmul_grad_w_acc(const Tensor& G, int gc, const Tensor& X, int xc,
                        Tensor& GW, int wc) {
  const int64_t n_rows = G.rows, dout = G.cols, din = X.cols;
  for (int64_t n = 0; n < n_rows; ++n) {
    const double* g = G.c[gc].data() + n * dout;
    const double* x = X.c[xc].data() + n * din;
    for (int64_t i = 0; i < dout; ++i) {
      double* o = GW.c[wc].data() + i * din;
      const double v = g[i];
      for (int64_t j = 0; j < din; ++j) o[j] += v * x[j];
    }
  }
}

}  // namespace noge
