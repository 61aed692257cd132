#include <algorithm>

#include <omp.h>

#include "kernels_detail.hpp"

namespace pnppbcd::kernels::omp {

namespace {
// Pixels per work item for the mode-3 products; the inner loops run over a
// contiguous block of one band so they vectorize.
constexpr Index kBlock = 256;
}  // namespace

Tensor3 mode3_product(const Tensor3& z, const Matrix& y) {
  detail::check_product_shapes(z, y);
  const Index n = z.pixels();
  const Index r = z.n3();
  const Index bands = y.rows();
  Tensor3 out(z.n1(), z.n2(), bands);
  const double* src = z.data().data();
  double* dst = out.data().data();
  const Index blocks = (n + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (Index blk = 0; blk < blocks; ++blk) {
    const Index lo = blk * kBlock;
    const Index hi = std::min(n, lo + kBlock);
    for (Index b = 0; b < bands; ++b) {
      double* row = dst + b * n;
      for (Index t = 0; t < r; ++t) {
        const double c = y(b, t);
        const double* in = src + t * n;
        for (Index j = lo; j < hi; ++j) row[j] += c * in[j];
      }
    }
  }
  return out;
}

Tensor3 mode3_contract(const Tensor3& x, const Matrix& e) {
  detail::check_contract_shapes(x, e);
  const Index n = x.pixels();
  const Index r = e.cols();
  Tensor3 out(x.n1(), x.n2(), r);
  const double* src = x.data().data();
  double* dst = out.data().data();
  const Index blocks = (n + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (Index blk = 0; blk < blocks; ++blk) {
    const Index lo = blk * kBlock;
    const Index hi = std::min(n, lo + kBlock);
    for (Index t = 0; t < r; ++t) {
      double* row = dst + t * n;
      for (Index b = 0; b < x.n3(); ++b) {
        const double c = e(b, t);
        const double* in = src + b * n;
        for (Index j = lo; j < hi; ++j) row[j] += c * in[j];
      }
    }
  }
  return out;
}

Matrix mode3_gram(const Tensor3& x, const Tensor3& z) {
  detail::check_gram_shapes(x, z);
  const Index n = x.pixels();
  const Index rows = x.n3();
  const Index cols = z.n3();
  Matrix g(rows, cols);
  const double* xs = x.data().data();
  const double* zs = z.data().data();
#pragma omp parallel for collapse(2) schedule(static)
  for (Index b = 0; b < rows; ++b)
    for (Index t = 0; t < cols; ++t) {
      const double* xr = xs + b * n;
      const double* zr = zs + t * n;
      double s = 0.0;
      for (Index j = 0; j < n; ++j) s += xr[j] * zr[j];
      g(b, t) = s;
    }
  return g;
}

std::vector<double> fiber_norms(const Tensor3& t) {
  const Index n = t.pixels();
  const Index len = t.n3();
  const double* base = t.data().data();
  std::vector<double> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j) out[j] = std::sqrt(detail::fiber_sq_norm(base + j, n, len));
  return out;
}

void group_shrink(Tensor3& t, const RadialMap& radial) {
  const Index n = t.pixels();
  const Index len = t.n3();
  double* base = t.data().data();
#pragma omp parallel for schedule(dynamic, 64)
  for (Index j = 0; j < n; ++j) detail::shrink_fiber(base + j, n, len, radial);
}

void smooth_periodic(const Matrix& in, double w, Matrix& out) {
  const Index n1 = in.rows();
  const Index n2 = in.cols();
  Matrix tmp(n1, n2);
  out.resize(n1, n2);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (Index i2 = 0; i2 < n2; ++i2) {
      const double* c = in.data() + i2 * n1;
      double* o = tmp.data() + i2 * n1;
      o[0] = detail::smooth_tap(c[n1 - 1], c[0], c[1 % n1], w);
      for (Index i1 = 1; i1 + 1 < n1; ++i1) o[i1] = detail::smooth_tap(c[i1 - 1], c[i1], c[i1 + 1], w);
      if (n1 > 1) o[n1 - 1] = detail::smooth_tap(c[n1 - 2], c[n1 - 1], c[0], w);
    }
#pragma omp for schedule(static)
    for (Index i2 = 0; i2 < n2; ++i2) {
      const double* l = tmp.data() + ((i2 + n2 - 1) % n2) * n1;
      const double* c = tmp.data() + i2 * n1;
      const double* r = tmp.data() + ((i2 + 1) % n2) * n1;
      double* o = out.data() + i2 * n1;
      for (Index i1 = 0; i1 < n1; ++i1) o[i1] = detail::smooth_tap(l[i1], c[i1], r[i1], w);
    }
  }
}

std::vector<double> whitened_sq_norms(const Tensor3& x, const Vector& mean, const Matrix& chol_lower) {
  const Index n = x.pixels();
  const double* base = x.data().data();
  std::vector<double> out(static_cast<std::size_t>(n));
#pragma omp parallel
  {
    std::vector<double> work(static_cast<std::size_t>(x.n3()));
#pragma omp for schedule(static)
    for (Index j = 0; j < n; ++j) out[j] = detail::whitened_fiber(base + j, n, mean, chol_lower, work.data());
  }
  return out;
}

}  // namespace pnppbcd::kernels::omp
