#include "vortexmf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "vortexmf/fft.hpp"
#include "vortexmf/gridio.hpp"

namespace vortexmf {

namespace {

constexpr double kInvE = 0.36787944117144232160;  // 1/e

double bump(double r) {
  if (r >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r * r));
}

// Composite Simpson of f on [0, 1] with 2*m panels.
template <typename F>
double simpson01(F&& f, int m) {
  const int n = 2 * m;
  const double h = 1.0 / n;
  double acc = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) {
    acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

}  // namespace

double gamma_modulus(double r) {
  if (r < 0.0) throw std::invalid_argument("gamma_modulus: negative radius");
  if (r == 0.0) return 0.0;
  if (r < kInvE) return r * (1.0 - std::log(r));
  return r + kInvE;
}

bool gamma_linear_bound_holds(double r, double eps) {
  if (!(eps > 0.0) || !(eps < kInvE)) {
    throw std::invalid_argument("gamma_linear_bound_holds: eps outside (0,1/e)");
  }
  if (r < 0.0) throw std::invalid_argument("gamma_linear_bound_holds: r < 0");
  const double lhs = gamma_modulus(r);
  const double rhs = -std::log(eps) * r + eps;
  return lhs <= rhs + 1e-12 * std::max(1.0, rhs);
}

Mollifier::Mollifier() {
  const double mass_unnorm =
      2.0 * std::numbers::pi * simpson01([](double r) { return bump(r) * r; }, 2048);
  norm_const_ = 1.0 / mass_unnorm;
}

double Mollifier::density(double r) const { return norm_const_ * bump(r); }

double Mollifier::fourier(double s) const {
  const double a = std::abs(s);
  const double val = simpson01(
      [a](double r) { return bump(r) * std::cyl_bessel_j(0.0, a * r) * r; },
      2048);
  return 2.0 * std::numbers::pi * norm_const_ * val;
}

double Mollifier::mass() const {
  return 2.0 * std::numbers::pi *
         simpson01([this](double r) { return density(r) * r; }, 2048);
}

SpectralKernel::SpectralKernel(int kmax) : kmax_(kmax) {
  if (kmax < 1) throw std::invalid_argument("SpectralKernel: kmax must be >= 1");
}

Vec2 SpectralKernel::eval(const TorusDisplacement& x) const {
  if (x.norm() < 1e-12) {
    throw std::domain_error("SpectralKernel::eval: singular at the origin");
  }
  // Pairing k with -k collapses the series to a sine sum over the half
  // lattice: K(x) = sum 2 perp(k) sin(k.x) / |k|^2.
  Vec2 out;
  for (int k1 = 0; k1 <= kmax_; ++k1) {
    const int k2lo = (k1 == 0) ? 1 : -kmax_;
    for (int k2 = k2lo; k2 <= kmax_; ++k2) {
      const double k_sq = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
      const double c = 2.0 * std::sin(k1 * x.d1 + k2 * x.d2) / k_sq;
      out += Vec2{-static_cast<double>(k2), static_cast<double>(k1)} * c;
    }
  }
  return out;
}

MollifiedKernel::MollifiedKernel(SpectralKernel kernel, Mollifier mollifier,
                                 double eps, int table_n)
    : kernel_(kernel), mollifier_(std::move(mollifier)), eps_(eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("MollifiedKernel: eps <= 0");
  if (table_n == 0) {
    int want = static_cast<int>(std::ceil(std::max(256.0, 8.0 / eps)));
    int n = 256;
    while (n < want) n *= 2;
    table_n = n;
  }
  n_ = table_n;
  const int kmax = kernel_.kmax();
  if (n_ < 2 * kmax + 2) {
    throw std::invalid_argument("MollifiedKernel: table too coarse for kmax");
  }

  rho_hat_.assign(static_cast<std::size_t>(2 * kmax * kmax + 1), -1.0);
  for (int k1 = 0; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const int ks = k1 * k1 + k2 * k2;
      if (rho_hat_[ks] < 0.0) {
        rho_hat_[ks] = mollifier_.fourier(eps_ * std::sqrt(static_cast<double>(ks)));
      }
    }
  }

  Fft2D fft(n_);
  const std::size_t sz = fft.size();
  std::vector<std::complex<double>> bufx(sz), bufy(sz);
  std::vector<std::complex<double>> j11(sz), j12(sz), j21(sz), j22(sz);
  const std::complex<double> im(0.0, 1.0);
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const std::size_t idx =
          static_cast<std::size_t>(fft.index_of(k1)) * n_ + fft.index_of(k2);
      const double k_sq = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
      const double w = rho_hat_[static_cast<int>(k_sq)] / k_sq;
      // K_hat(k) = i (k2, -k1) / |k|^2, times rho_hat(eps k)
      const std::complex<double> cx = im * (k2 * w);
      const std::complex<double> cy = im * (-k1 * w);
      bufx[idx] = cx;
      bufy[idx] = cy;
      // D(K^eps)_ab has coefficient i k_b K_hat_a
      j11[idx] = im * static_cast<double>(k1) * cx;
      j12[idx] = im * static_cast<double>(k2) * cx;
      j21[idx] = im * static_cast<double>(k1) * cy;
      j22[idx] = im * static_cast<double>(k2) * cy;
    }
  }
  fft.inverse(bufx.data());
  fft.inverse(bufy.data());
  vx_.resize(sz);
  vy_.resize(sz);
  for (std::size_t i = 0; i < sz; ++i) {
    vx_[i] = bufx[i].real();
    vy_[i] = bufy[i].real();
  }
  vx_[0] = 0.0;  // K^eps(0) = 0 by odd symmetry; clear FFT dust
  vy_[0] = 0.0;

  fft.inverse(j11.data());
  fft.inverse(j12.data());
  fft.inverse(j21.data());
  fft.inverse(j22.data());
  double sup = 0.0;
  for (std::size_t i = 0; i < sz; ++i) {
    const Mat2 jac{j11[i].real(), j12[i].real(), j21[i].real(), j22[i].real()};
    sup = std::max(sup, jac.frobenius());
  }
  dk_sup_ = sup;
}

double MollifiedKernel::rho_hat(int k_sq) const {
  return rho_hat_.at(static_cast<std::size_t>(k_sq));
}

Vec2 MollifiedKernel::eval_raw(double d1, double d2) const {
  // d1, d2 in [-L/2, L/2); fold into [0, L) grid coordinates.
  const double h = kTorusLength / n_;
  double u = d1 / h;
  double v = d2 / h;
  if (u < 0.0) u += n_;
  if (v < 0.0) v += n_;
  int i0 = static_cast<int>(u);
  int j0 = static_cast<int>(v);
  if (i0 >= n_) i0 -= n_;
  if (j0 >= n_) j0 -= n_;
  const double fu = u - std::floor(u);
  const double fv = v - std::floor(v);
  const int i1 = (i0 + 1 == n_) ? 0 : i0 + 1;
  const int j1 = (j0 + 1 == n_) ? 0 : j0 + 1;
  const std::size_t a = static_cast<std::size_t>(i0) * n_ + j0;
  const std::size_t b = static_cast<std::size_t>(i0) * n_ + j1;
  const std::size_t c = static_cast<std::size_t>(i1) * n_ + j0;
  const std::size_t d = static_cast<std::size_t>(i1) * n_ + j1;
  const double w00 = (1.0 - fu) * (1.0 - fv);
  const double w01 = (1.0 - fu) * fv;
  const double w10 = fu * (1.0 - fv);
  const double w11 = fu * fv;
  return {w00 * vx_[a] + w01 * vx_[b] + w10 * vx_[c] + w11 * vx_[d],
          w00 * vy_[a] + w01 * vy_[b] + w10 * vy_[c] + w11 * vy_[d]};
}

Vec2 MollifiedKernel::eval(const TorusDisplacement& x) const {
  // Canonicalize the sign so that eval(-x) is the bitwise negation of
  // eval(x); pairwise interaction sums then cancel exactly.
  if (x.d1 == 0.0 && x.d2 == 0.0) return {0.0, 0.0};
  if (x.d1 < 0.0 || (x.d1 == 0.0 && x.d2 < 0.0)) {
    const Vec2 m = eval_raw(-x.d1, -x.d2);
    return {-m.x, -m.y};
  }
  return eval_raw(x.d1, x.d2);
}

Vec2 MollifiedKernel::eval_spectral(const TorusDisplacement& x) const {
  const int kmax = kernel_.kmax();
  Vec2 out;
  for (int k1 = 0; k1 <= kmax; ++k1) {
    const int k2lo = (k1 == 0) ? 1 : -kmax;
    for (int k2 = k2lo; k2 <= kmax; ++k2) {
      const int ks = k1 * k1 + k2 * k2;
      const double c =
          2.0 * rho_hat_[ks] * std::sin(k1 * x.d1 + k2 * x.d2) / ks;
      out += Vec2{-static_cast<double>(k2), static_cast<double>(k1)} * c;
    }
  }
  return out;
}

void MollifiedKernel::write_table(const std::filesystem::path& path) const {
  std::vector<double> payload;
  payload.reserve(vx_.size() + vy_.size());
  payload.insert(payload.end(), vx_.begin(), vx_.end());
  payload.insert(payload.end(), vy_.begin(), vy_.end());
  write_grid_file(path, n_, 2, eps_, static_cast<double>(kernel_.kmax()),
                  payload);
}

double lipschitz_bound_b(const MollifiedKernel& m, double tv) {
  if (tv < 0.0) throw std::invalid_argument("lipschitz_bound_b: tv < 0");
  return m.dk_sup() * tv;
}

double kernel_l1_diff(const MollifiedKernel& m, const TorusGrid& quad) {
  const int n = quad.n;
  const int kmax = m.kmax();
  if (n < 4.0 / m.eps()) {
    throw std::invalid_argument("kernel_l1_diff: grid too coarse for eps");
  }
  if (n < 2 * kmax + 2) {
    throw std::invalid_argument("kernel_l1_diff: grid too coarse for kmax");
  }

  Fft2D fft(n);
  const std::size_t sz = fft.size();
  // Difference coefficients K_hat(k)(rho_hat(eps k) - 1) for both components.
  std::vector<std::complex<double>> dx(sz), dy(sz);
  const std::complex<double> im(0.0, 1.0);
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const std::size_t idx =
          static_cast<std::size_t>(fft.index_of(k1)) * n + fft.index_of(k2);
      const int ks = k1 * k1 + k2 * k2;
      const double w = (m.rho_hat(ks) - 1.0) / ks;
      dx[idx] = im * (k2 * w);
      dy[idx] = im * (-k1 * w);
    }
  }
  fft.inverse(dx.data());
  fft.inverse(dy.data());

  const double h = quad.spacing();
  const double cell = h * h;
  double acc = 0.0;
  const TorusPoint origin{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (torus_dist(quad.node(i, j), origin) < h) continue;
      const std::size_t idx = static_cast<std::size_t>(i) * n + j;
      acc += std::hypot(dx[idx].real(), dy[idx].real()) * cell;
    }
  }
  // Analytic value of the excluded-disk contribution for the 1/(2 pi r)
  // singularity; bounded by (pi/2) eps under the resolution precondition.
  return acc + h;
}

}  // namespace vortexmf
