#include "pnppbcd/stiefel.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/SVD>

#include "pnppbcd/kernels.hpp"

namespace pnppbcd {

namespace {
constexpr double kDriftTol = 1e-10;
}  // namespace

double StiefelPoint::drift(const Matrix& m) {
  return (m.transpose() * m - Matrix::Identity(m.cols(), m.cols())).norm();
}

StiefelPoint::StiefelPoint(Matrix m) {
  if (m.rows() < m.cols() || m.cols() == 0) {
    throw ShapeError("StiefelPoint: need n >= r >= 1, got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
  if (drift(m) <= kDriftTol) {
    e_ = std::move(m);
    return;
  }
  auto proj = project_stiefel(m);
  if (proj.rank_deficient) throw ConfigError("StiefelPoint: matrix is rank deficient");
  e_ = std::move(proj.point.e_);
}

StiefelProjection project_stiefel(const Matrix& m) {
  if (m.rows() < m.cols() || m.cols() == 0) {
    throw ShapeError("project_stiefel: need n >= r >= 1, got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Matrix u = svd.matrixU();
  Matrix v = svd.matrixV();
  for (Index c = 0; c < u.cols(); ++c) {
    Index imax = 0;
    u.col(c).cwiseAbs().maxCoeff(&imax);
    if (u(imax, c) < 0.0) {
      u.col(c) *= -1.0;
      v.col(c) *= -1.0;
    }
  }
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double cutoff = std::max<double>(m.rows(), m.cols()) * std::numeric_limits<double>::epsilon() * smax;
  StiefelProjection out{StiefelPoint(u * v.transpose(), StiefelPoint::Unchecked{}), false};
  out.rank_deficient = smax == 0.0 || sv(sv.size() - 1) <= cutoff;
  return out;
}

Matrix tangent_project(const StiefelPoint& x, const Matrix& y) {
  const Matrix& e = x.matrix();
  if (y.rows() != e.rows() || y.cols() != e.cols()) throw ShapeError("tangent_project: shape mismatch");
  const Matrix sym = e.transpose() * y + y.transpose() * e;
  return y - 0.5 * e * sym;
}

Matrix riemannian_grad_H(const Tensor3& z, const StiefelPoint& e, const Tensor3& s, const Tensor3& o,
                         double delta) {
  if (s.dims() != o.dims()) throw ShapeError("riemannian_grad_H: S and O differ in shape");
  if (z.n1() != o.n1() || z.n2() != o.n2() || z.n3() != e.cols() || e.rows() != o.n3()) {
    throw ShapeError("riemannian_grad_H: inconsistent Z, E, O shapes");
  }
  if (StiefelPoint::drift(e.matrix()) > kDriftTol) throw ConfigError("riemannian_grad_H: E is not orthonormal");
  const Matrix g = -delta * kernels::mode3_gram(kernels::Exec::parallel, o - s, z);
  return tangent_project(e, g);
}

}  // namespace pnppbcd
