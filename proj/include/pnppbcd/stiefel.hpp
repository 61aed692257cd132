#pragma once

// Orthonormal bases E (n3 x r, E^T E = I) and the projections the E-update
// and the stationarity diagnostics need.

#include "pnppbcd/tensor.hpp"

namespace pnppbcd {

struct StiefelProjection;
StiefelProjection project_stiefel(const Matrix& m);

class StiefelPoint {
 public:
  StiefelPoint() = default;
  /// Accepts m if |m^T m - I|_F <= 1e-10, re-orthonormalizes it (polar factor)
  /// if the drift is larger but m has full column rank, throws otherwise.
  explicit StiefelPoint(Matrix m);

  const Matrix& matrix() const { return e_; }
  Index rows() const { return e_.rows(); }
  Index cols() const { return e_.cols(); }

  /// |E^T E - I|_F
  static double drift(const Matrix& m);

 private:
  friend StiefelProjection project_stiefel(const Matrix& m);
  struct Unchecked {};
  StiefelPoint(Matrix m, Unchecked) : e_(std::move(m)) {}

  Matrix e_;
};

struct StiefelProjection {
  StiefelPoint point;
  /// The smallest singular value is numerically zero, so the nearest
  /// orthonormal matrix is not unique.
  bool rank_deficient = false;
};

/// U V^T from a thin SVD of m (n >= r): the nearest orthonormal matrix in
/// Frobenius norm. Singular vector pairs are sign-normalized so that the
/// largest-magnitude entry of each left vector is nonnegative.
StiefelProjection project_stiefel(const Matrix& m);

/// Y - X (X^T Y + Y^T X) / 2
Matrix tangent_project(const StiefelPoint& x, const Matrix& y);

/// Riemannian gradient in E of H = (delta/2)|Z x_3 E + S - O|^2, computed as
/// the tangent projection of -delta (O - S)_(3) Z_(3)^T.
Matrix riemannian_grad_H(const Tensor3& z, const StiefelPoint& e, const Tensor3& s, const Tensor3& o,
                         double delta);

}  // namespace pnppbcd
