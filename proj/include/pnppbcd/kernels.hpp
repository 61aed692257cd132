#pragma once

// Data-parallel inner loops of the solver and detectors.
//
// Every kernel exists twice: a plain serial reference (kernels::serial) and an
// OpenMP version (kernels::omp). Both evaluate each output element with the
// same sequence of floating-point operations, so results are bitwise identical
// regardless of thread count or partitioning. Reductions over many elements
// (norms, inner products) are deliberately not provided here; callers do
// those serially.

#include <functional>
#include <vector>

#include "pnppbcd/tensor.hpp"

namespace pnppbcd::kernels {

enum class Exec { serial, parallel };

/// Radial map applied to a fiber norm: returns the new norm.
using RadialMap = std::function<double(double)>;

namespace serial {
Tensor3 mode3_product(const Tensor3& z, const Matrix& y);
Tensor3 mode3_contract(const Tensor3& x, const Matrix& e);
Matrix mode3_gram(const Tensor3& x, const Tensor3& z);
std::vector<double> fiber_norms(const Tensor3& t);
void group_shrink(Tensor3& t, const RadialMap& radial);
void smooth_periodic(const Matrix& in, double w, Matrix& out);
std::vector<double> whitened_sq_norms(const Tensor3& x, const Vector& mean, const Matrix& chol_lower);
}  // namespace serial

namespace omp {
Tensor3 mode3_product(const Tensor3& z, const Matrix& y);
Tensor3 mode3_contract(const Tensor3& x, const Matrix& e);
Matrix mode3_gram(const Tensor3& x, const Tensor3& z);
std::vector<double> fiber_norms(const Tensor3& t);
void group_shrink(Tensor3& t, const RadialMap& radial);
void smooth_periodic(const Matrix& in, double w, Matrix& out);
std::vector<double> whitened_sq_norms(const Tensor3& x, const Vector& mean, const Matrix& chol_lower);
}  // namespace omp

/// Z x_3 Y; Z is (n1, n2, r), Y is (n3, r).
Tensor3 mode3_product(Exec exec, const Tensor3& z, const Matrix& y);

/// X x_3 E^T; X is (n1, n2, n3), E is (n3, r).
Tensor3 mode3_contract(Exec exec, const Tensor3& x, const Matrix& e);

/// X_(3) Z_(3)^T for X of dims (n1, n2, n3) and Z of dims (n1, n2, r).
Matrix mode3_gram(Exec exec, const Tensor3& x, const Tensor3& z);

/// l2 norm of every mode-3 fiber, indexed by pixel j = i1 + n1*i2.
std::vector<double> fiber_norms(Exec exec, const Tensor3& t);

/// In place: every nonzero fiber s is replaced by radial(|s|) * s / |s|.
/// Zero fibers stay zero.
void group_shrink(Exec exec, Tensor3& t, const RadialMap& radial);

/// One pass of the separable periodic 3-tap smoother [w, 1-2w, w] along
/// both image axes. `out` is resized to match `in`.
void smooth_periodic(Exec exec, const Matrix& in, double w, Matrix& out);

/// |L^{-1} (x_j - mean)|^2 for every pixel fiber x_j, with L lower triangular.
std::vector<double> whitened_sq_norms(Exec exec, const Tensor3& x, const Vector& mean,
                                      const Matrix& chol_lower);

}  // namespace pnppbcd::kernels
