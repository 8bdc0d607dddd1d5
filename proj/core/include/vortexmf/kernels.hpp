#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "vortexmf/torus.hpp"

namespace vortexmf {

/// Log-Lipschitz concave modulus gamma(r) = r(1 - log r) for 0 < r < 1/e and
/// r + 1/e beyond; gamma(0) = 0. Throws on negative input.
double gamma_modulus(double r);

/// Oracle for the linear domination gamma(r) <= -log(eps) r + eps, valid for
/// every r >= 0 and 0 < eps < 1/e (checked; a hair of floating-point slack is
/// allowed at the tangency r = eps).
bool gamma_linear_bound_holds(double r, double eps);

/// Smooth radial bump exp(-1/(1-|x|^2)) on the unit ball, normalized to unit
/// mass. Fourier transforms are evaluated radially by quadrature and cached
/// per kernel table.
class Mollifier {
 public:
  Mollifier();

  /// Radial density value at radius r (zero for r >= 1).
  double density(double r) const;
  /// rho(x) for the scaled mollifier eps^{-2} rho(x/eps) is obtained by the
  /// caller; this returns the unscaled profile.
  /// Radial Fourier transform rho_hat(s) = int rho(x) e^{-i s.x} dx, s = |xi|.
  double fourier(double s) const;
  /// Quadrature check of the total mass (should be 1 within 1e-10).
  double mass() const;

 private:
  double norm_const_{0.0};
};

/// Truncated spectral Biot-Savart kernel on the 2pi-torus. Coefficients are
/// K_hat(k) = i (k2, -k1) / |k|^2 for 0 < |k|_inf <= kmax, zero mean, exactly
/// divergence free at the coefficient level: k . (k2, -k1) = 0. The sign
/// convention makes curl(K * xi) = xi for the spectral velocity inversion.
class SpectralKernel {
 public:
  explicit SpectralKernel(int kmax);

  int kmax() const { return kmax_; }

  /// Direct lattice summation; the singular kernel is never evaluated at the
  /// origin: |x| < 1e-12 throws.
  Vec2 eval(const TorusDisplacement& x) const;

 private:
  int kmax_;
};

/// K^eps = K * rho^eps, represented by its spectral coefficients
/// K_hat(k) rho_hat(eps k) and a precomputed n-by-n grid table evaluated by
/// antisymmetry-canonical bilinear interpolation. Immutable after
/// construction; safe for unsynchronized concurrent reads.
class MollifiedKernel {
 public:
  /// table_n = 0 picks the default resolution max(256, 8/eps) rounded up to
  /// the next power of two.
  MollifiedKernel(SpectralKernel kernel, Mollifier mollifier, double eps,
                  int table_n = 0);

  double eps() const { return eps_; }
  int table_n() const { return n_; }
  int kmax() const { return kernel_.kmax(); }
  const SpectralKernel& kernel() const { return kernel_; }
  const Mollifier& mollifier() const { return mollifier_; }

  /// Bilinear table lookup. Exactly odd: eval(-x) == -eval(x) bitwise, and
  /// eval(0) == (0, 0).
  Vec2 eval(const TorusDisplacement& x) const;

  /// Slow exact truncated mode sum, for oracle tests.
  Vec2 eval_spectral(const TorusDisplacement& x) const;

  /// Grid-sampled sup of the Jacobian Frobenius norm, |DK^eps|_{C^0}.
  double dk_sup() const { return dk_sup_; }

  /// Mollifier transform at lattice radius-squared k2 (cached table).
  double rho_hat(int k_sq) const;

  /// Export the grid table (binary grid file: header n, eps, kmax; payload
  /// two row-major component planes of 64-bit little-endian floats).
  void write_table(const std::filesystem::path& path) const;

 private:
  SpectralKernel kernel_;
  Mollifier mollifier_;
  double eps_;
  int n_;
  double dk_sup_{0.0};
  std::vector<double> vx_, vy_;       // n*n node values
  std::vector<double> rho_hat_;       // indexed by k1^2+k2^2
  Vec2 eval_raw(double d1, double d2) const;
};

/// Lipschitz bound for the measure-convolved drift: Lip(K^eps) * |mu|.
double lipschitz_bound_b(const MollifiedKernel& m, double tv);

/// Quadrature estimate of |K^eps - K|_{L1}: node sum over the given grid,
/// excluding the singular cell at 0 (disk of radius h) and adding the
/// analytic excluded-disk value h (<= (pi/2) eps under the precondition).
/// Requires quad.n >= 4/eps and quad.n > 2*kmax; throws otherwise.
double kernel_l1_diff(const MollifiedKernel& m, const TorusGrid& quad);

}  // namespace vortexmf
