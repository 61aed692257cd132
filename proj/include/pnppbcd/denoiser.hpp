#pragma once

// Gradient-step denoiser D = Id - grad g with g(x) = |x - B x|^2 / 2, its
// relaxed form D^gamma = Id - gamma grad g and the shifted form
// D~(z) = (D^gamma(a z + b) - b) / a, plus the potential phi whose proximal
// map D~ is.
//
// The smoother B is a symmetric linear operator on n1 x n2 images: the
// separable periodic 3-tap kernel [w, 1 - 2w, w] applied along each axis with
// w = 0.25 sigma / (sigma + 0.05). For w < 1/4 its spectrum lies in
// ((1 - 4w)^2, 1], so grad g = (I - B)^2 is Lipschitz with constant below 1.
// Band indices are 0-based.

#include <vector>

#include "pnppbcd/kernels.hpp"
#include "pnppbcd/tensor.hpp"

namespace pnppbcd {

class SmoothPrior {
 public:
  enum class Kind { identity, linear_smoother };

  static SmoothPrior identity() { return SmoothPrior(Kind::identity, 0.0); }
  /// sigma >= 0 is the noise level; sigma = 0 gives B = I.
  static SmoothPrior linear_smoother(double sigma);

  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  /// Off-centre tap weight w of the 1-D kernel; 0 for the identity prior.
  double weight() const { return w_; }

  /// Upper bound on the Lipschitz constant of grad g valid for every image
  /// size: (1 - (1 - 4w)^2)^2.
  double lipschitz_bound() const;

 private:
  SmoothPrior(Kind k, double sigma);
  Kind kind_;
  double sigma_;
  double w_;
};

/// Kernel weight used for a given noise level.
double smoother_weight(double sigma);

Matrix apply_smoother(const SmoothPrior& p, const Matrix& x, kernels::Exec exec = kernels::Exec::parallel);
/// (I - B)^2 x
Matrix grad_g(const SmoothPrior& p, const Matrix& x, kernels::Exec exec = kernels::Exec::parallel);
double g_value(const SmoothPrior& p, const Matrix& x, kernels::Exec exec = kernels::Exec::parallel);

/// Largest eigenvalue of (I - B)^2 on n1 x n2 images by power iteration from
/// a fixed pseudo-random start.
double lipschitz_estimate(const SmoothPrior& p, Index n1, Index n2, int max_iter = 2000);

class DenoiserSpec {
 public:
  /// One prior per band. Throws ConfigError unless gamma in [0, 1], a > 0,
  /// lambda > 0 and gamma * L < 1 for every band.
  DenoiserSpec(std::vector<SmoothPrior> priors, double gamma, double a, double b, double lambda);

  Index bands() const { return static_cast<Index>(priors_.size()); }
  const SmoothPrior& prior(Index band) const;
  const std::vector<SmoothPrior>& priors() const { return priors_; }
  double gamma() const { return gamma_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double lambda() const { return lambda_; }

  /// lambda * max_n gamma L_n / (gamma L_n + 1), with L_n the size-free bound.
  double rho2() const;

 private:
  std::vector<SmoothPrior> priors_;
  double gamma_;
  double a_;
  double b_;
  double lambda_;
};

/// D^gamma(y) = y - gamma grad g(y), no shift.
Matrix relaxed_denoise(const DenoiserSpec& spec, Index band, const Matrix& y,
                       kernels::Exec exec = kernels::Exec::parallel);

/// D~(x) = (D^gamma(a x + b) - b) / a
Matrix denoise(const DenoiserSpec& spec, Index band, const Matrix& x,
               kernels::Exec exec = kernels::Exec::parallel);

/// Band-wise D~ of an (n1, n2, r) tensor.
Tensor3 denoise_all(const DenoiserSpec& spec, const Tensor3& x, kernels::Exec exec = kernels::Exec::parallel);

/// v with denoise(spec, band, v) = z, by conjugate gradients on
/// (I - gamma (I - B)^2) y = a z + b.
Matrix inverse_denoise(const DenoiserSpec& spec, Index band, const Matrix& z);

/// phi~(z) = [gamma g(y) - |y - (a z + b)|^2 / 2] / a^2 with y = a p + b, where
/// p is the caller-supplied preimage (denoise(p) = z). Throws
/// InvariantViolation if the preimage does not map to z within
/// 1e-8 * max(1, |z|).
double phi_eval(const DenoiserSpec& spec, Index band, const Matrix& z, const Matrix& preimage);

/// lambda * sum_n phi~(Z_n).
double prior_value(const DenoiserSpec& spec, const Tensor3& z, const Tensor3& preimages);

/// Noise standard deviation of an image from its high-pass residual
/// y - B_ref y (w = 1/4), normalized by the residual filter's l2 norm so that
/// white noise of level s yields s. Sample std with n - 1 denominator.
double estimate_noise_level(const Matrix& image);

enum class SigmaPolicy {
  pooled,    // median of the per-band estimates, shared by every band
  per_band,  // each band keeps its own estimate
};

/// Per-band noise levels of a Z + b, clamped to [1e-4, 0.5].
std::vector<double> estimate_band_sigmas(const Tensor3& z, double a, double b, SigmaPolicy policy);

}  // namespace pnppbcd
