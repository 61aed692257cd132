#pragma once

// Anomaly score maps, the global RX baseline and ROC/AUC evaluation.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pnppbcd/kernels.hpp"
#include "pnppbcd/tensor.hpp"

namespace pnppbcd {

/// Per-pixel scores; scores(i1, i2).
struct ScoreMap {
  Matrix scores;
  Index n1() const { return scores.rows(); }
  Index n2() const { return scores.cols(); }
};

/// Binary ground truth, column-major n1 x n2 like ScoreMap.
struct Mask {
  Index n1 = 0;
  Index n2 = 0;
  std::vector<std::uint8_t> data;
  std::uint8_t operator()(Index i1, Index i2) const { return data[static_cast<std::size_t>(i1 + n1 * i2)]; }
};

/// l2 norm of every spectral fiber of S.
ScoreMap anomaly_scores(const Tensor3& s, kernels::Exec exec = kernels::Exec::parallel);

struct RxResult {
  ScoreMap map;
  /// The sample covariance was singular and only the ridge made it invertible.
  bool singular_covariance = false;
};

/// (x - mu)^T (C + 1e-6 tr(C)/n3 I)^{-1} (x - mu) with C the sample
/// covariance (n - 1 denominator) over all pixels.
RxResult rx_scores(const Tensor3& o, kernels::Exec exec = kernels::Exec::parallel);

struct RocPoint {
  double threshold;
  double far;
  double pd;
};

struct RocResult {
  /// Starts at (0, 0) with threshold +inf and ends at (1, 1).
  std::vector<RocPoint> curve;
  double auc = 0.0;
};

/// Sweeps every distinct score as a threshold (score >= threshold counts as
/// detected), in decreasing order. Tied scores move the curve diagonally.
/// Throws ConfigError if truth has no positive or no negative pixel.
RocResult roc_auc(const ScoreMap& scores, const Mask& truth);
/// Same on flat arrays.
RocResult roc_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& truth);

/// Header threshold,far,pd.
void write_roc_csv(std::ostream& out, const RocResult& roc);

/// Header i,j,score with 1-based pixel indices, i fastest, 17 significant digits.
void write_scores_csv(std::ostream& out, const ScoreMap& map);
/// Throws FormatError on malformed content.
ScoreMap read_scores_csv(std::istream& in);

}  // namespace pnppbcd
