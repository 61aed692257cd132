#pragma once

#include <random>

#include <Eigen/QR>

#include "pnppbcd/tensor.hpp"

namespace testing_helpers {

using pnppbcd::Index;
using pnppbcd::Matrix;
using pnppbcd::Tensor3;

inline Tensor3 random_tensor(std::mt19937_64& rng, Index n1, Index n2, Index n3, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Tensor3 t(n1, n2, n3);
  for (double& v : t.data()) v = nd(rng);
  return t;
}

inline Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = nd(rng);
  return m;
}

inline Matrix random_orthonormal(std::mt19937_64& rng, Index n, Index r) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, r));
  return qr.householderQ() * Matrix::Identity(n, r);
}

}  // namespace testing_helpers
