#include "pnppbcd/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/QR>

#include "pnppbcd/kernels.hpp"

namespace pnppbcd {

namespace {

// Sum of three random low-frequency periodic cosines, scaled to unit std.
Matrix smooth_field(Index n1, Index n2, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> freq(0, 3);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> amp;
  Matrix f = Matrix::Zero(n1, n2);
  for (int c = 0; c < 3; ++c) {
    const int kx = freq(rng);
    const int ky = freq(rng);
    const double ph = phase(rng);
    const double a = amp(rng);
    for (Index j = 0; j < n2; ++j)
      for (Index i = 0; i < n1; ++i)
        f(i, j) += a * std::cos(2.0 * std::numbers::pi * (kx * double(i) / n1 + ky * double(j) / n2) + ph);
  }
  const double mean = f.mean();
  const double sd = std::sqrt((f.array() - mean).square().sum() / static_cast<double>(f.size()));
  return f / (sd + 1e-12);
}

}  // namespace

void SyntheticSpec::validate() const {
  if (dims.n1 < 1 || dims.n2 < 1 || dims.n3 < 1) throw ConfigError("synth: dims must be positive");
  if (rank < 1 || rank > dims.n3) throw ConfigError("synth: rank must lie in [1, n3]");
  if (anomalies < 0 || anomalies > dims.pixels()) throw ConfigError("synth: anomaly count must lie in [0, n1*n2]");
  if (anomalies > 0 && rank == dims.n3) throw ConfigError("synth: anomalies need rank < n3");
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) throw ConfigError("synth: magnitude must be >= 0");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("synth: noise must be >= 0");
  if (blobs < 0 || !(blob_width > 0.0) || !std::isfinite(blob_amplitude)) throw ConfigError("synth: bad blob settings");
}

SyntheticScene synth_scene(const SyntheticSpec& spec) {
  spec.validate();
  const Index n1 = spec.dims.n1;
  const Index n2 = spec.dims.n2;
  const Index n3 = spec.dims.n3;
  const Index r = spec.rank;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> nd;

  Matrix m(n3, r);
  for (Index c = 0; c < r; ++c)
    for (Index i = 0; i < n3; ++i) m(i, c) = c == 0 ? 1.0 : nd(rng);
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix e = qr.householderQ() * Matrix::Identity(n3, r);
  if (e.col(0).sum() < 0.0) e.col(0) *= -1.0;

  const double root = std::sqrt(static_cast<double>(n3));
  Tensor3 z(n1, n2, r);
  z.band(0) = (0.5 * root * (1.0 + 0.2 * smooth_field(n1, n2, rng).array())).matrix();
  for (Index k = 1; k < r; ++k) z.band(k) = 0.1 * root * smooth_field(n1, n2, rng);
  if (r > 1) {
    std::uniform_int_distribution<Index> row(0, n1 - 1);
    std::uniform_int_distribution<Index> col(0, n2 - 1);
    std::uniform_int_distribution<Index> comp(1, r - 1);
    const double s2 = 2.0 * spec.blob_width * spec.blob_width;
    for (Index q = 0; q < spec.blobs; ++q) {
      const Index ci = row(rng);
      const Index cj = col(rng);
      const Index k = comp(rng);
      for (Index j = 0; j < n2; ++j)
        for (Index i = 0; i < n1; ++i) {
          const double d2 = double(i - ci) * double(i - ci) + double(j - cj) * double(j - cj);
          z(i, j, k) += spec.blob_amplitude * std::exp(-d2 / s2);
        }
    }
  }
  Tensor3 l = kernels::mode3_product(kernels::Exec::serial, z, e);

  Tensor3 s(spec.dims);
  Mask truth{n1, n2, std::vector<std::uint8_t>(static_cast<std::size_t>(n1 * n2), 0)};
  if (spec.anomalies > 0) {
    Vector t(n3);
    for (Index i = 0; i < n3; ++i) t(i) = nd(rng);
    t -= e * (e.transpose() * t);
    t /= t.norm();
    std::vector<Index> pix(static_cast<std::size_t>(n1 * n2));
    for (Index p = 0; p < n1 * n2; ++p) pix[static_cast<std::size_t>(p)] = p;
    // Partial Fisher-Yates: the first `anomalies` entries are a uniform sample.
    for (Index q = 0; q < spec.anomalies; ++q) {
      std::uniform_int_distribution<Index> pick(q, n1 * n2 - 1);
      std::swap(pix[static_cast<std::size_t>(q)], pix[static_cast<std::size_t>(pick(rng))]);
      const Index p = pix[static_cast<std::size_t>(q)];
      truth.data[static_cast<std::size_t>(p)] = 1;
      for (Index b = 0; b < n3; ++b) s(p % n1, p / n1, b) = spec.magnitude * root * t(b);
    }
  }

  Tensor3 noise(spec.dims);
  if (spec.noise > 0.0)
    for (double& v : noise.data()) v = spec.noise * nd(rng);

  Tensor3 o = l + s + noise;
  return {std::move(o), std::move(truth), std::move(l), std::move(s), std::move(noise), std::move(e), std::move(z)};
}

}  // namespace pnppbcd
