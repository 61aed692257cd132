#pragma once

// Seeded synthetic scenes O = Z x_3 E + S + N.
//
// The background is rank r_true: E has a constant first column (brightness)
// plus random orthonormal columns, Z holds smooth random eigenimages, and a
// few compact bright blobs sit in non-brightness eigenimages. Every anomaly
// pixel carries the same signature, a unit vector orthogonal to span(E),
// scaled so that each band has amplitude `magnitude` (fiber norm
// magnitude * sqrt(n3)). N is iid Gaussian with standard deviation `noise`.

#include <cstdint>

#include "pnppbcd/detector.hpp"
#include "pnppbcd/tensor.hpp"

namespace pnppbcd {

struct SyntheticSpec {
  Dims dims{50, 50, 30};
  Index rank = 4;
  Index anomalies = 20;
  double magnitude = 0.8;
  double noise = 0.03;
  std::uint64_t seed = 1;
  Index blobs = 2;
  double blob_amplitude = 10.0;
  double blob_width = 1.2;

  /// Throws ConfigError.
  void validate() const;
};

struct SyntheticScene {
  Tensor3 o;
  Mask truth;
  Tensor3 L;
  Tensor3 S;
  Tensor3 N;
  Matrix E;
  Tensor3 Z;
};

SyntheticScene synth_scene(const SyntheticSpec& spec);

}  // namespace pnppbcd
