#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vortexmf/torus.hpp"

namespace vortexmf {

/// One trigonometric noise mode sigma(x) = (cos(k.x) + sin(k.x)) * v.
/// The divergence-free hypothesis is the orthogonality k . v = 0.
struct NoiseMode {
  int k1{0};
  int k2{0};
  Vec2 v;  // amplitude vector, v = perp(k)/|k|^beta for the built-in family
};

/// Truncated family {sigma_k : 0 < |k|_inf <= kmax} with v_k = k_perp/|k|^beta,
/// plus its covariance Q and the Stratonovich-to-Ito correction. Immutable
/// after construction; all evaluations are pure.
class NoiseModel {
 public:
  /// Built-in family from the spectral example; beta > 4, kmax >= 0
  /// (kmax = 0 yields the empty, noise-free model).
  NoiseModel(int kmax, double beta);

  /// Custom trigonometric mode table. Every mode must satisfy k . v = 0.
  explicit NoiseModel(std::vector<NoiseMode> modes);

  std::span<const NoiseMode> modes() const { return modes_; }
  std::size_t mode_count() const { return modes_.size(); }
  int kmax() const { return kmax_; }
  double beta() const { return beta_; }

  /// Isotropic variance a with Q(0) = a I, assembled from the truncated set.
  double isotropic_variance() const { return a_; }

  /// Upper bound on sup_x |sum_k c_k sigma_k(x)| per unit |c|: sum_k sqrt2 |v_k|.
  double sup_norm_bound() const { return sup_bound_; }

  static Vec2 sigma_eval(const NoiseMode& m, const TorusPoint& x);
  static Mat2 sigma_jacobian(const NoiseMode& m, const TorusPoint& x);

  /// Q(x, y) = sum_k sigma_k(x) sigma_k(y)^T over the truncated set.
  Mat2 covariance_Q(const TorusPoint& x, const TorusPoint& y) const;

  /// (1/2) sum_k Dsigma_k(x) sigma_k(x); identically zero when k . v = 0.
  Vec2 strat_correction(const TorusPoint& x) const;

  /// sum_k dW[k] * sigma_k(x) for a per-mode increment vector.
  Vec2 weighted_sum(const TorusPoint& x, std::span<const double> dW) const;

 private:
  std::vector<NoiseMode> modes_;
  int kmax_{0};
  double beta_{0.0};
  double a_{0.0};
  double sup_bound_{0.0};
};

/// Deterministic per-mode Brownian increment streams, generated counter-based
/// at the finest configured step dt_fine. A coarse increment over [j*dt,
/// (j+1)*dt) is the sum of its fine sub-increments, so simulations at
/// different dt consume consistent realizations of the same noise.
class BrownianPath {
 public:
  BrownianPath(std::uint64_t seed, double dt_fine, std::size_t n_modes);

  std::uint64_t seed() const { return seed_; }
  double dt_fine() const { return dt_fine_; }
  std::size_t mode_count() const { return n_modes_; }

  /// Number of fine sub-steps in one step of size dt; throws unless dt is an
  /// integer multiple of dt_fine (relative tolerance 1e-9).
  std::uint64_t substeps(double dt) const;

  double fine_increment(std::uint32_t mode, std::uint64_t fine_step) const;

  /// Per-mode increments for coarse step `step` of size dt, written to `out`
  /// (resized to mode_count()). Serving the same step twice returns identical
  /// values; steps may be requested in any order.
  void increments(double dt, std::uint64_t step, std::vector<double>& out) const;

  /// FNV-1a checksum of the fine increments consumed by `nsteps` coarse steps
  /// of size dt, in (mode-major, step-minor) order. Two runs that share the
  /// realized noise over a common horizon agree on this value.
  std::uint64_t checksum(double dt, std::uint64_t nsteps) const;

 private:
  std::uint64_t seed_{0};
  double dt_fine_{0.0};
  std::size_t n_modes_{0};
  double sqrt_dt_fine_{0.0};
};

}  // namespace vortexmf
