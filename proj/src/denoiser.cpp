#include "pnppbcd/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pnppbcd {

namespace {

constexpr double kSigmaMin = 1e-4;
constexpr double kSigmaMax = 0.5;

// l2 norm of the stencil of I - B at w = 1/4: centre 3/4, edges -1/8,
// corners -1/16.
const double kRefResidualNorm = std::sqrt(0.640625);

void check_band(const DenoiserSpec& spec, Index band) {
  if (band < 0 || band >= spec.bands()) {
    throw ShapeError("denoiser: band " + std::to_string(band) + " out of range [0, " +
                     std::to_string(spec.bands()) + ")");
  }
}

}  // namespace

double smoother_weight(double sigma) { return 0.25 * sigma / (sigma + 0.05); }

SmoothPrior::SmoothPrior(Kind k, double sigma) : kind_(k), sigma_(sigma), w_(0.0) {
  if (k == Kind::linear_smoother) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("linear smoother: sigma must be finite and >= 0");
    w_ = smoother_weight(sigma);
  }
}

SmoothPrior SmoothPrior::linear_smoother(double sigma) { return SmoothPrior(Kind::linear_smoother, sigma); }

double SmoothPrior::lipschitz_bound() const {
  const double beta_min = (1.0 - 4.0 * w_) * (1.0 - 4.0 * w_);
  return (1.0 - beta_min) * (1.0 - beta_min);
}

Matrix apply_smoother(const SmoothPrior& p, const Matrix& x, kernels::Exec exec) {
  if (p.kind() == SmoothPrior::Kind::identity || p.weight() == 0.0) return x;
  Matrix out;
  kernels::smooth_periodic(exec, x, p.weight(), out);
  return out;
}

Matrix grad_g(const SmoothPrior& p, const Matrix& x, kernels::Exec exec) {
  if (p.kind() == SmoothPrior::Kind::identity) return Matrix::Zero(x.rows(), x.cols());
  const Matrix d = x - apply_smoother(p, x, exec);
  return d - apply_smoother(p, d, exec);
}

double g_value(const SmoothPrior& p, const Matrix& x, kernels::Exec exec) {
  if (p.kind() == SmoothPrior::Kind::identity) return 0.0;
  return 0.5 * (x - apply_smoother(p, x, exec)).squaredNorm();
}

double lipschitz_estimate(const SmoothPrior& p, Index n1, Index n2, int max_iter) {
  if (n1 < 1 || n2 < 1) throw ShapeError("lipschitz_estimate: empty image");
  if (p.kind() == SmoothPrior::Kind::identity) return 0.0;
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> nd;
  Matrix v(n1, n2);
  for (Index k = 0; k < v.size(); ++k) v.data()[k] = nd(rng);
  v /= v.norm();
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Matrix w = grad_g(p, v);
    const double next = v.cwiseProduct(w).sum();
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (it > 0 && std::abs(next - est) <= 1e-14 * std::max(1.0, next)) {
      est = next;
      break;
    }
    est = next;
  }
  return est;
}

DenoiserSpec::DenoiserSpec(std::vector<SmoothPrior> priors, double gamma, double a, double b, double lambda)
    : priors_(std::move(priors)), gamma_(gamma), a_(a), b_(b), lambda_(lambda) {
  if (priors_.empty()) throw ConfigError("denoiser: need at least one band prior");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("denoiser: gamma must lie in [0, 1]");
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("denoiser: a must be positive");
  if (!std::isfinite(b)) throw ConfigError("denoiser: b must be finite");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("denoiser: lambda must be positive");
  for (const auto& p : priors_) {
    if (!(gamma * p.lipschitz_bound() < 1.0)) throw ConfigError("denoiser: gamma * L must be < 1");
  }
}

const SmoothPrior& DenoiserSpec::prior(Index band) const {
  check_band(*this, band);
  return priors_[static_cast<std::size_t>(band)];
}

double DenoiserSpec::rho2() const {
  double worst = 0.0;
  for (const auto& p : priors_) {
    const double gl = gamma_ * p.lipschitz_bound();
    worst = std::max(worst, gl / (gl + 1.0));
  }
  return lambda_ * worst;
}

Matrix relaxed_denoise(const DenoiserSpec& spec, Index band, const Matrix& y, kernels::Exec exec) {
  const SmoothPrior& p = spec.prior(band);
  if (p.kind() == SmoothPrior::Kind::identity || spec.gamma() == 0.0) return y;
  return y - spec.gamma() * grad_g(p, y, exec);
}

Matrix denoise(const DenoiserSpec& spec, Index band, const Matrix& x, kernels::Exec exec) {
  check_band(spec, band);
  const double a = spec.a();
  const double b = spec.b();
  const Matrix y = (a * x.array() + b).matrix();
  return ((relaxed_denoise(spec, band, y, exec).array() - b) / a).matrix();
}

Tensor3 denoise_all(const DenoiserSpec& spec, const Tensor3& x, kernels::Exec exec) {
  if (x.n3() != spec.bands()) throw ShapeError("denoise_all: tensor has a different number of bands than the spec");
  Tensor3 out(x.dims());
  for (Index n = 0; n < x.n3(); ++n) out.band(n) = denoise(spec, n, Matrix(x.band(n)), exec);
  return out;
}

Matrix inverse_denoise(const DenoiserSpec& spec, Index band, const Matrix& z) {
  const SmoothPrior& p = spec.prior(band);
  if (p.kind() == SmoothPrior::Kind::identity || spec.gamma() == 0.0) return z;
  const double a = spec.a();
  const double b = spec.b();
  const Matrix rhs = (a * z.array() + b).matrix();
  auto op = [&](const Matrix& v) { return relaxed_denoise(spec, band, v); };

  // The operator is symmetric with spectrum in [1 - gamma L, 1].
  Matrix v = rhs;
  Matrix r = rhs - op(v);
  Matrix d = r;
  double rr = r.squaredNorm();
  const double stop = 1e-30 * std::max(1.0, rhs.squaredNorm());
  for (int it = 0; it < 10000 && rr > stop; ++it) {
    const Matrix q = op(d);
    const double alpha = rr / d.cwiseProduct(q).sum();
    v += alpha * d;
    r -= alpha * q;
    const double rr_next = r.squaredNorm();
    d = r + (rr_next / rr) * d;
    rr = rr_next;
  }
  return ((v.array() - b) / a).matrix();
}

double phi_eval(const DenoiserSpec& spec, Index band, const Matrix& z, const Matrix& preimage) {
  if (z.rows() != preimage.rows() || z.cols() != preimage.cols()) throw ShapeError("phi_eval: shape mismatch");
  const SmoothPrior& p = spec.prior(band);
  const double mismatch = (denoise(spec, band, preimage) - z).norm();
  if (!(mismatch <= 1e-8 * std::max(1.0, z.norm()))) {
    throw InvariantViolation("phi_eval: preimage does not map to z (residual " + std::to_string(mismatch) + ")");
  }
  if (p.kind() == SmoothPrior::Kind::identity || spec.gamma() == 0.0) return 0.0;
  const double a = spec.a();
  const double b = spec.b();
  const Matrix y = (a * preimage.array() + b).matrix();
  const Matrix x = (a * z.array() + b).matrix();
  const double val = (spec.gamma() * g_value(p, y) - 0.5 * (y - x).squaredNorm()) / (a * a);
  return std::max(val, 0.0);
}

double prior_value(const DenoiserSpec& spec, const Tensor3& z, const Tensor3& preimages) {
  if (z.dims() != preimages.dims()) throw ShapeError("prior_value: preimages differ in shape");
  if (z.n3() != spec.bands()) throw ShapeError("prior_value: band count differs from spec");
  double total = 0.0;
  for (Index n = 0; n < z.n3(); ++n) total += phi_eval(spec, n, Matrix(z.band(n)), Matrix(preimages.band(n)));
  return spec.lambda() * total;
}

double estimate_noise_level(const Matrix& image) {
  if (image.size() < 2) return 0.0;
  Matrix smooth;
  kernels::smooth_periodic(kernels::Exec::serial, image, 0.25, smooth);
  const Matrix res = image - smooth;
  const double mean = res.mean();
  const double var = (res.array() - mean).square().sum() / static_cast<double>(res.size() - 1);
  return std::sqrt(var) / kRefResidualNorm;
}

std::vector<double> estimate_band_sigmas(const Tensor3& z, double a, double b, SigmaPolicy policy) {
  std::vector<double> sig;
  for (Index n = 0; n < z.n3(); ++n) {
    const Matrix y = (a * z.band(n).array() + b).matrix();
    sig.push_back(std::clamp(estimate_noise_level(y), kSigmaMin, kSigmaMax));
  }
  if (policy == SigmaPolicy::pooled && !sig.empty()) {
    std::vector<double> sorted = sig;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    const double med = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    std::fill(sig.begin(), sig.end(), med);
  }
  return sig;
}

}  // namespace pnppbcd
