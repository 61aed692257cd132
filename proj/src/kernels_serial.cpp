#include "kernels_detail.hpp"

namespace pnppbcd::kernels {

namespace serial {

Tensor3 mode3_product(const Tensor3& z, const Matrix& y) {
  detail::check_product_shapes(z, y);
  const Index n = z.pixels();
  const Index r = z.n3();
  Tensor3 out(z.n1(), z.n2(), y.rows());
  auto src = z.data();
  auto dst = out.data();
  for (Index j = 0; j < n; ++j)
    for (Index b = 0; b < y.rows(); ++b) {
      double s = 0.0;
      for (Index t = 0; t < r; ++t) s += y(b, t) * src[t * n + j];
      dst[b * n + j] = s;
    }
  return out;
}

Tensor3 mode3_contract(const Tensor3& x, const Matrix& e) {
  detail::check_contract_shapes(x, e);
  const Index n = x.pixels();
  Tensor3 out(x.n1(), x.n2(), e.cols());
  auto src = x.data();
  auto dst = out.data();
  for (Index j = 0; j < n; ++j)
    for (Index t = 0; t < e.cols(); ++t) {
      double s = 0.0;
      for (Index b = 0; b < x.n3(); ++b) s += e(b, t) * src[b * n + j];
      dst[t * n + j] = s;
    }
  return out;
}

Matrix mode3_gram(const Tensor3& x, const Tensor3& z) {
  detail::check_gram_shapes(x, z);
  const Index n = x.pixels();
  Matrix g(x.n3(), z.n3());
  auto xs = x.data();
  auto zs = z.data();
  for (Index b = 0; b < x.n3(); ++b)
    for (Index t = 0; t < z.n3(); ++t) {
      double s = 0.0;
      for (Index j = 0; j < n; ++j) s += xs[b * n + j] * zs[t * n + j];
      g(b, t) = s;
    }
  return g;
}

std::vector<double> fiber_norms(const Tensor3& t) {
  const Index n = t.pixels();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j)
    out[j] = std::sqrt(detail::fiber_sq_norm(t.data().data() + j, n, t.n3()));
  return out;
}

void group_shrink(Tensor3& t, const RadialMap& radial) {
  const Index n = t.pixels();
  for (Index j = 0; j < n; ++j) detail::shrink_fiber(t.data().data() + j, n, t.n3(), radial);
}

void smooth_periodic(const Matrix& in, double w, Matrix& out) {
  const Index n1 = in.rows();
  const Index n2 = in.cols();
  Matrix tmp(n1, n2);
  for (Index i2 = 0; i2 < n2; ++i2)
    for (Index i1 = 0; i1 < n1; ++i1)
      tmp(i1, i2) = detail::smooth_tap(in((i1 + n1 - 1) % n1, i2), in(i1, i2), in((i1 + 1) % n1, i2), w);
  out.resize(n1, n2);
  for (Index i2 = 0; i2 < n2; ++i2)
    for (Index i1 = 0; i1 < n1; ++i1)
      out(i1, i2) = detail::smooth_tap(tmp(i1, (i2 + n2 - 1) % n2), tmp(i1, i2), tmp(i1, (i2 + 1) % n2), w);
}

std::vector<double> whitened_sq_norms(const Tensor3& x, const Vector& mean, const Matrix& chol_lower) {
  const Index n = x.pixels();
  std::vector<double> out(static_cast<std::size_t>(n));
  std::vector<double> work(static_cast<std::size_t>(x.n3()));
  for (Index j = 0; j < n; ++j)
    out[j] = detail::whitened_fiber(x.data().data() + j, n, mean, chol_lower, work.data());
  return out;
}

}  // namespace serial

Tensor3 mode3_product(Exec exec, const Tensor3& z, const Matrix& y) {
  return exec == Exec::serial ? serial::mode3_product(z, y) : omp::mode3_product(z, y);
}

Tensor3 mode3_contract(Exec exec, const Tensor3& x, const Matrix& e) {
  return exec == Exec::serial ? serial::mode3_contract(x, e) : omp::mode3_contract(x, e);
}

Matrix mode3_gram(Exec exec, const Tensor3& x, const Tensor3& z) {
  return exec == Exec::serial ? serial::mode3_gram(x, z) : omp::mode3_gram(x, z);
}

std::vector<double> fiber_norms(Exec exec, const Tensor3& t) {
  return exec == Exec::serial ? serial::fiber_norms(t) : omp::fiber_norms(t);
}

void group_shrink(Exec exec, Tensor3& t, const RadialMap& radial) {
  exec == Exec::serial ? serial::group_shrink(t, radial) : omp::group_shrink(t, radial);
}

void smooth_periodic(Exec exec, const Matrix& in, double w, Matrix& out) {
  exec == Exec::serial ? serial::smooth_periodic(in, w, out) : omp::smooth_periodic(in, w, out);
}

std::vector<double> whitened_sq_norms(Exec exec, const Tensor3& x, const Vector& mean,
                                      const Matrix& chol_lower) {
  return exec == Exec::serial ? serial::whitened_sq_norms(x, mean, chol_lower)
                              : omp::whitened_sq_norms(x, mean, chol_lower);
}

}  // namespace pnppbcd::kernels
