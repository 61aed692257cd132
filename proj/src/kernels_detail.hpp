#pragma once

// Per-element bodies shared by the serial and OpenMP kernels. Keeping one
// definition of each formula is what makes the two paths bitwise equal.

#include <cmath>

#include "pnppbcd/kernels.hpp"

namespace pnppbcd::kernels::detail {

inline void check_product_shapes(const Tensor3& z, const Matrix& y) {
  if (y.cols() != z.n3()) {
    throw ShapeError("mode3_product: matrix has " + std::to_string(y.cols()) +
                     " columns, tensor has " + std::to_string(z.n3()) + " bands");
  }
}

inline void check_contract_shapes(const Tensor3& x, const Matrix& e) {
  if (e.rows() != x.n3()) {
    throw ShapeError("mode3_contract: matrix has " + std::to_string(e.rows()) +
                     " rows, tensor has " + std::to_string(x.n3()) + " bands");
  }
}

inline void check_gram_shapes(const Tensor3& x, const Tensor3& z) {
  if (x.n1() != z.n1() || x.n2() != z.n2()) throw ShapeError("mode3_gram: spatial dims differ");
}

inline double fiber_sq_norm(const double* base, Index stride, Index len) {
  double s = 0.0;
  for (Index k = 0; k < len; ++k) s += base[k * stride] * base[k * stride];
  return s;
}

inline void shrink_fiber(double* base, Index stride, Index len, const RadialMap& radial) {
  const double norm = std::sqrt(fiber_sq_norm(base, stride, len));
  if (norm == 0.0) return;
  const double scale = radial(norm) / norm;
  for (Index k = 0; k < len; ++k) base[k * stride] *= scale;
}

inline double smooth_tap(double left, double centre, double right, double w) {
  return (1.0 - 2.0 * w) * centre + w * (left + right);
}

// Forward substitution L y = x_j - mean, returning |y|^2.
inline double whitened_fiber(const double* base, Index stride, const Vector& mean, const Matrix& l,
                             double* work) {
  const Index n = mean.size();
  double s = 0.0;
  for (Index i = 0; i < n; ++i) {
    double v = base[i * stride] - mean[i];
    for (Index k = 0; k < i; ++k) v -= l(i, k) * work[k];
    v /= l(i, i);
    work[i] = v;
    s += v * v;
  }
  return s;
}

}  // namespace pnppbcd::kernels::detail
