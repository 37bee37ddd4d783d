#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace noge {

// Dense component tensor: `comps` parallel real arrays of shape rows x cols,
// row-major. comps = 1 for real tensors, 4 for quaternion (a, b, c, d), and
// 8 for dual quaternion (q.a q.b q.c q.d p.a p.b p.c p.d).
struct Tensor {
  int comps = 0;
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<std::vector<double>> c;

  Tensor() = default;
  Tensor(int comps_, int64_t rows_, int64_t cols_)
      : comps(comps_), rows(rows_), cols(cols_),
        c(static_cast<size_t>(comps_),
          std::vector<double>(static_cast<size_t>(rows_ * cols_), 0.0)) {}

  int64_t size() const { return rows * cols; }           // per component
  int64_t flat_count() const { return comps * size(); }  // all components

  bool same_shape(const Tensor& o) const {
    return comps == o.comps && rows == o.rows && cols == o.cols;
  }

  void fill(double v) {
    for (auto& arr : c) std::fill(arr.begin(), arr.end(), v);
  }

  // Flat addressing across components, used by finite-difference checks and
  // the optimizer: k = comp * size() + offset.
  double get_flat(int64_t k) const {
    return c[static_cast<size_t>(k / size())][static_cast<size_t>(k % size())];
  }
  void add_flat(int64_t k, double dv) {
    c[static_cast<size_t>(k / size())][static_cast<size_t>(k % size())] += dv;
  }
};

inline Tensor zeros_like(const Tensor& t) { return Tensor(t.comps, t.rows, t.cols); }

inline bool all_finite(const Tensor& t) {
  for (const auto& arr : t.c)
    for (double v : arr)
      if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace noge
