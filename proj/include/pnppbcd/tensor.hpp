#pragma once

// Dense third-order tensors and the mode-k algebra used throughout the solver.
//
// Indexing convention: the mathematical notation for x_{i1 i2 i3} is 1-based;
// every C++ entry point in this library is 0-based. Element (i1, i2, i3) lives
// at linear offset i1 + n1 * (i2 + n2 * i3), so that:
//   * a frontal slice X_{::i3} is a contiguous column-major n1 x n2 image, and
//   * the mode-3 unfolding X_(3) (n3 x n1*n2, column j = i1 + n1*i2) is the
//     same buffer read as a row-major matrix.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pnppbcd/error.hpp"

namespace pnppbcd {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Dims {
  Index n1 = 0;
  Index n2 = 0;
  Index n3 = 0;

  Index pixels() const { return n1 * n2; }
  Index size() const { return n1 * n2 * n3; }
  Index operator[](int mode) const;  // mode in {1, 2, 3}
  friend bool operator==(const Dims&, const Dims&) = default;
};

std::string to_string(const Dims& d);

class Tensor3 {
 public:
  Tensor3() = default;
  /// Zero tensor. All dimensions must be positive.
  explicit Tensor3(Dims dims);
  Tensor3(Index n1, Index n2, Index n3) : Tensor3(Dims{n1, n2, n3}) {}
  Tensor3(Dims dims, std::vector<double> data);

  const Dims& dims() const { return dims_; }
  Index n1() const { return dims_.n1; }
  Index n2() const { return dims_.n2; }
  Index n3() const { return dims_.n3; }
  Index pixels() const { return dims_.pixels(); }
  Index size() const { return dims_.size(); }

  double& operator()(Index i1, Index i2, Index i3) { return data_[offset(i1, i2, i3)]; }
  double operator()(Index i1, Index i2, Index i3) const { return data_[offset(i1, i2, i3)]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Zero-copy view of the mode-3 unfolding X_(3).
  Eigen::Map<RowMatrix> mode3() { return {data_.data(), dims_.n3, dims_.pixels()}; }
  Eigen::Map<const RowMatrix> mode3() const { return {data_.data(), dims_.n3, dims_.pixels()}; }

  /// Zero-copy view of frontal slice X_{::i3} as an n1 x n2 image.
  Eigen::Map<Matrix> band(Index i3);
  Eigen::Map<const Matrix> band(Index i3) const;

  Tensor3& operator+=(const Tensor3& o);
  Tensor3& operator-=(const Tensor3& o);
  Tensor3& operator*=(double s);
  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

  bool all_finite() const;
  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  Index offset(Index i1, Index i2, Index i3) const { return i1 + dims_.n1 * (i2 + dims_.n2 * i3); }

  Dims dims_;
  std::vector<double> data_;
};

/// Mode-k unfolding, k in {1, 2, 3}. Result is n_k x prod_{j != k} n_j.
Matrix unfold(const Tensor3& t, int mode);

/// Inverse of unfold for the given dims.
Tensor3 fold(const Matrix& m, int mode, const Dims& dims);

/// Z x_3 Y for Z of dims (n1, n2, r) and Y of shape (n3, r).
Tensor3 mode3_product(const Tensor3& z, const Matrix& y);

/// X x_3 E^T for X of dims (n1, n2, n3) and E of shape (n3, r): fold_3(E^T X_(3)).
Tensor3 mode3_contract(const Tensor3& x, const Matrix& e);

/// Copy of the mode-3 fiber x_{i j :}.
Vector fiber3(const Tensor3& t, Index i, Index j);

double frob_norm(const Tensor3& t);
double inner(const Tensor3& a, const Tensor3& b);

}  // namespace pnppbcd
