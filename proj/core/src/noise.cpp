#include "vortexmf/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "vortexmf/philox.hpp"

namespace vortexmf {

namespace {

double mode_norm(int k1, int k2) {
  return std::sqrt(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
}

}  // namespace

NoiseModel::NoiseModel(int kmax, double beta) : kmax_(kmax), beta_(beta) {
  if (kmax < 0) throw std::invalid_argument("NoiseModel: kmax must be >= 0");
  if (kmax > 0 && beta <= 4.0) {
    throw std::invalid_argument("NoiseModel: beta must exceed 4");
  }
  // Fixed row-major mode ordering; the order is part of the determinism
  // contract for BrownianPath consumers.
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const double nk = mode_norm(k1, k2);
      const double scale = std::pow(nk, -beta);
      // perp(k) = (-k2, k1)
      modes_.push_back({k1, k2, Vec2{-k2 * scale, k1 * scale}});
    }
  }
  for (const auto& m : modes_) {
    const double v2 = m.v.dot(m.v);
    a_ += v2;
    sup_bound_ += std::numbers::sqrt2 * std::sqrt(v2);
  }
  a_ *= 0.5;  // Q(0) = a I and tr(v v^T) = |v|^2 summed over all modes = 2a
}

NoiseModel::NoiseModel(std::vector<NoiseMode> modes) : modes_(std::move(modes)) {
  for (const auto& m : modes_) {
    if (m.k1 == 0 && m.k2 == 0) {
      throw std::invalid_argument("NoiseModel: zero wavevector mode");
    }
    if (std::abs(m.k1 * m.v.x + m.k2 * m.v.y) > 1e-14) {
      throw std::invalid_argument("NoiseModel: mode violates k . v = 0");
    }
    kmax_ = std::max({kmax_, std::abs(m.k1), std::abs(m.k2)});
    const double v2 = m.v.dot(m.v);
    a_ += v2;
    sup_bound_ += std::numbers::sqrt2 * std::sqrt(v2);
  }
  a_ *= 0.5;
}

Vec2 NoiseModel::sigma_eval(const NoiseMode& m, const TorusPoint& x) {
  const double phase = m.k1 * x.x1 + m.k2 * x.x2;
  const double amp = std::cos(phase) + std::sin(phase);
  return m.v * amp;
}

Mat2 NoiseModel::sigma_jacobian(const NoiseMode& m, const TorusPoint& x) {
  const double phase = m.k1 * x.x1 + m.k2 * x.x2;
  const double amp = std::cos(phase) - std::sin(phase);
  return {amp * m.v.x * m.k1, amp * m.v.x * m.k2,
          amp * m.v.y * m.k1, amp * m.v.y * m.k2};
}

Mat2 NoiseModel::covariance_Q(const TorusPoint& x, const TorusPoint& y) const {
  Mat2 q;
  for (const auto& m : modes_) {
    const Vec2 sx = sigma_eval(m, x);
    const Vec2 sy = sigma_eval(m, y);
    q += Mat2{sx.x * sy.x, sx.x * sy.y, sx.y * sy.x, sx.y * sy.y};
  }
  return q;
}

Vec2 NoiseModel::strat_correction(const TorusPoint& x) const {
  Vec2 c;
  for (const auto& m : modes_) {
    const Vec2 s = sigma_eval(m, x);
    const Mat2 j = sigma_jacobian(m, x);
    c += j.apply(s);
  }
  return c * 0.5;
}

Vec2 NoiseModel::weighted_sum(const TorusPoint& x,
                              std::span<const double> dW) const {
  if (dW.size() != modes_.size()) {
    throw std::invalid_argument("NoiseModel: increment vector size mismatch");
  }
  Vec2 out;
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    out += sigma_eval(modes_[k], x) * dW[k];
  }
  return out;
}

BrownianPath::BrownianPath(std::uint64_t seed, double dt_fine,
                           std::size_t n_modes)
    : seed_(seed), dt_fine_(dt_fine), n_modes_(n_modes) {
  if (!(dt_fine > 0.0)) {
    throw std::invalid_argument("BrownianPath: dt_fine must be positive");
  }
  sqrt_dt_fine_ = std::sqrt(dt_fine);
}

std::uint64_t BrownianPath::substeps(double dt) const {
  const double ratio = dt / dt_fine_;
  const auto m = static_cast<std::uint64_t>(std::llround(ratio));
  if (m == 0 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio) {
    throw std::invalid_argument(
        "BrownianPath: dt must be an integer multiple of dt_fine");
  }
  return m;
}

double BrownianPath::fine_increment(std::uint32_t mode,
                                    std::uint64_t fine_step) const {
  return sqrt_dt_fine_ * philox_normal(seed_, mode, fine_step);
}

void BrownianPath::increments(double dt, std::uint64_t step,
                              std::vector<double>& out) const {
  const std::uint64_t m = substeps(dt);
  out.assign(n_modes_, 0.0);
  for (std::size_t mode = 0; mode < n_modes_; ++mode) {
    double acc = 0.0;
    const std::uint64_t base = step * m;
    for (std::uint64_t sub = 0; sub < m; ++sub) {
      acc += fine_increment(static_cast<std::uint32_t>(mode), base + sub);
    }
    out[mode] = acc;
  }
}

std::uint64_t BrownianPath::checksum(double dt, std::uint64_t nsteps) const {
  const std::uint64_t fine_total = substeps(dt) * nsteps;
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a offset basis
  auto mix = [&h](std::uint64_t bits) {
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  for (std::size_t mode = 0; mode < n_modes_; ++mode) {
    for (std::uint64_t j = 0; j < fine_total; ++j) {
      const double v = fine_increment(static_cast<std::uint32_t>(mode), j);
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(v));
      __builtin_memcpy(&bits, &v, sizeof(bits));
      mix(bits);
    }
  }
  return h;
}

}  // namespace vortexmf
