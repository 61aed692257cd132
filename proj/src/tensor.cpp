#include "pnppbcd/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "pnppbcd/kernels.hpp"

namespace pnppbcd {

Index Dims::operator[](int mode) const {
  switch (mode) {
    case 1: return n1;
    case 2: return n2;
    case 3: return n3;
    default: throw ShapeError("mode index must be 1, 2 or 3, got " + std::to_string(mode));
  }
}

std::string to_string(const Dims& d) {
  return std::to_string(d.n1) + "x" + std::to_string(d.n2) + "x" + std::to_string(d.n3);
}

Tensor3::Tensor3(Dims dims) : dims_(dims) {
  if (dims.n1 <= 0 || dims.n2 <= 0 || dims.n3 <= 0) {
    throw ShapeError("tensor dimensions must be positive, got " + to_string(dims));
  }
  data_.assign(static_cast<std::size_t>(dims.size()), 0.0);
}

Tensor3::Tensor3(Dims dims, std::vector<double> data) : Tensor3(dims) {
  if (static_cast<Index>(data.size()) != dims.size()) {
    throw ShapeError("tensor data length " + std::to_string(data.size()) + " does not match " +
                     to_string(dims));
  }
  data_ = std::move(data);
}

Eigen::Map<Matrix> Tensor3::band(Index i3) {
  if (i3 < 0 || i3 >= dims_.n3) throw ShapeError("band index out of range");
  return {data_.data() + i3 * dims_.pixels(), dims_.n1, dims_.n2};
}

Eigen::Map<const Matrix> Tensor3::band(Index i3) const {
  if (i3 < 0 || i3 >= dims_.n3) throw ShapeError("band index out of range");
  return {data_.data() + i3 * dims_.pixels(), dims_.n1, dims_.n2};
}

Tensor3& Tensor3::operator+=(const Tensor3& o) {
  if (o.dims_ != dims_) throw ShapeError("tensor shape mismatch in +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& o) {
  if (o.dims_ != dims_) throw ShapeError("tensor shape mismatch in -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Tensor3& Tensor3::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

bool Tensor3::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

// Column index of x_{i1 i2 i3} in the mode-k unfolding (0-based form of
// j = 1 + sum_{l != k} (i_l - 1) prod_{m < l, m != k} n_m).
Index unfold_column(const Dims& d, int mode, Index i1, Index i2, Index i3) {
  switch (mode) {
    case 1: return i2 + d.n2 * i3;
    case 2: return i1 + d.n1 * i3;
    default: return i1 + d.n1 * i2;
  }
}

}  // namespace

Matrix unfold(const Tensor3& t, int mode) {
  const Dims& d = t.dims();
  const Index rows = d[mode];
  Matrix m(rows, d.size() / rows);
  for (Index i3 = 0; i3 < d.n3; ++i3)
    for (Index i2 = 0; i2 < d.n2; ++i2)
      for (Index i1 = 0; i1 < d.n1; ++i1) {
        const Index row = mode == 1 ? i1 : mode == 2 ? i2 : i3;
        m(row, unfold_column(d, mode, i1, i2, i3)) = t(i1, i2, i3);
      }
  return m;
}

Tensor3 fold(const Matrix& m, int mode, const Dims& dims) {
  Tensor3 t(dims);
  const Index rows = dims[mode];
  if (m.rows() != rows || m.cols() != dims.size() / rows) {
    throw ShapeError("fold: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     ", expected mode-" + std::to_string(mode) + " unfolding of " + to_string(dims));
  }
  for (Index i3 = 0; i3 < dims.n3; ++i3)
    for (Index i2 = 0; i2 < dims.n2; ++i2)
      for (Index i1 = 0; i1 < dims.n1; ++i1) {
        const Index row = mode == 1 ? i1 : mode == 2 ? i2 : i3;
        t(i1, i2, i3) = m(row, unfold_column(dims, mode, i1, i2, i3));
      }
  return t;
}

Tensor3 mode3_product(const Tensor3& z, const Matrix& y) {
  return kernels::mode3_product(kernels::Exec::parallel, z, y);
}

Tensor3 mode3_contract(const Tensor3& x, const Matrix& e) {
  return kernels::mode3_contract(kernels::Exec::parallel, x, e);
}

Vector fiber3(const Tensor3& t, Index i, Index j) {
  if (i < 0 || i >= t.n1() || j < 0 || j >= t.n2()) {
    throw ShapeError("fiber index (" + std::to_string(i) + ", " + std::to_string(j) +
                     ") out of range for " + to_string(t.dims()));
  }
  Vector v(t.n3());
  for (Index k = 0; k < t.n3(); ++k) v[k] = t(i, j, k);
  return v;
}

double inner(const Tensor3& a, const Tensor3& b) {
  if (a.dims() != b.dims()) throw ShapeError("inner: shape mismatch");
  double s = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) s += da[i] * db[i];
  return s;
}

double frob_norm(const Tensor3& t) {
  return std::sqrt(inner(t, t));
}

}  // namespace pnppbcd
