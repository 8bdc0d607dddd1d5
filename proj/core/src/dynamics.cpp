#include "vortexmf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace vortexmf {

VortexEnsemble VortexEnsemble::create(std::vector<double> x1,
                                      std::vector<double> x2,
                                      std::vector<double> xi, double eps,
                                      double tv_budget) {
  if (x1.size() != x2.size() || x1.size() != xi.size()) {
    throw std::invalid_argument("VortexEnsemble: array size mismatch");
  }
  VortexEnsemble ens;
  ens.eps = eps;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    const TorusPoint p = wrap(x1[i], x2[i]);
    x1[i] = p.x1;
    x2[i] = p.x2;
    if (!std::isfinite(xi[i])) {
      throw std::invalid_argument("VortexEnsemble: non-finite intensity");
    }
  }
  ens.x1 = std::move(x1);
  ens.x2 = std::move(x2);
  ens.xi = std::move(xi);
  if (ens.tv() > tv_budget + 1e-12) {
    throw std::invalid_argument(
        "VortexEnsemble: total variation exceeds budget M");
  }
  return ens;
}

double VortexEnsemble::tv() const {
  double acc = 0.0;
  for (double v : xi) acc += std::abs(v);
  return x1.empty() ? 0.0 : acc / static_cast<double>(x1.size());
}

SignedAtomicMeasure VortexEnsemble::empirical_measure() const {
  std::vector<WeightedAtom> atoms;
  atoms.reserve(size());
  const double inv_n = size() ? 1.0 / static_cast<double>(size()) : 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    atoms.push_back({{x1[i], x2[i]}, xi[i] * inv_n});
  }
  return SignedAtomicMeasure(std::move(atoms));
}

void SimulationConfig::validate() const {
  if (kernel == nullptr || noise == nullptr || path == nullptr) {
    throw std::invalid_argument("SimulationConfig: missing kernel/noise/path");
  }
  if (!(dt > 0.0) || !(T >= 0.0)) {
    throw std::invalid_argument("SimulationConfig: dt must be positive");
  }
  const double ratio = T / dt;
  const auto n = static_cast<std::uint64_t>(std::llround(ratio));
  if (T > 0.0 && std::abs(ratio - static_cast<double>(n)) > 1e-12 * std::max(1.0, ratio)) {
    throw std::invalid_argument("SimulationConfig: dt must divide T");
  }
  path->substeps(dt);  // throws unless dt is a multiple of dt_fine
  if (noise->mode_count() != path->mode_count()) {
    throw std::invalid_argument("SimulationConfig: mode count mismatch");
  }
}

std::uint64_t SimulationConfig::steps() const {
  return static_cast<std::uint64_t>(std::llround(T / dt));
}

namespace {

// Canonical particle order: by position, then intensity. Makes interaction
// sums independent of storage order (index-permutation equivariance is then
// bit-exact) and of the thread count.
std::vector<int> canonical_order(const VortexEnsemble& ens) {
  std::vector<int> order(ens.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (ens.x1[a] != ens.x1[b]) return ens.x1[a] < ens.x1[b];
    if (ens.x2[a] != ens.x2[b]) return ens.x2[a] < ens.x2[b];
    return ens.xi[a] < ens.xi[b];
  });
  return order;
}

std::vector<Vec2> interaction_drift(const VortexEnsemble& ens,
                                    const MollifiedKernel& kernel,
                                    const std::vector<int>& order) {
  const int n = static_cast<int>(ens.size());
  std::vector<Vec2> out(n);
  const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const TorusPoint pi{ens.x1[i], ens.x2[i]};
    double ax = 0.0, ay = 0.0;
    for (int jj = 0; jj < n; ++jj) {
      const int j = order[jj];
      if (j == i) continue;
      const Vec2 k = kernel.eval(min_image(pi, {ens.x1[j], ens.x2[j]}));
      ax += ens.xi[j] * k.x;
      ay += ens.xi[j] * k.y;
    }
    out[i] = {ax * inv_n, ay * inv_n};
  }
  return out;
}

// b(x, S_t) = (1/N) sum_j xi_j K^eps(x - X_j), same canonical order, no
// self-exclusion (K^eps(0) = 0 contributes exactly nothing).
Vec2 field_drift(const TorusPoint& x, const VortexEnsemble& ens,
                 const MollifiedKernel& kernel,
                 const std::vector<int>& order) {
  double ax = 0.0, ay = 0.0;
  for (std::size_t jj = 0; jj < ens.size(); ++jj) {
    const int j = order[jj];
    const Vec2 k = kernel.eval(min_image(x, {ens.x1[j], ens.x2[j]}));
    ax += ens.xi[j] * k.x;
    ay += ens.xi[j] * k.y;
  }
  const double inv_n = ens.size() ? 1.0 / static_cast<double>(ens.size()) : 0.0;
  return {ax * inv_n, ay * inv_n};
}

void check_finite(const VortexEnsemble& ens, std::uint64_t step_index) {
  for (std::size_t i = 0; i < ens.size(); ++i) {
    if (!std::isfinite(ens.x1[i]) || !std::isfinite(ens.x2[i])) {
      throw std::runtime_error("vortex step diverged at step " +
                               std::to_string(step_index) + ", particle " +
                               std::to_string(i));
    }
  }
}

void check_pair_cancellation(const VortexEnsemble& ens,
                             const std::vector<Vec2>& drifts,
                             std::uint64_t step_index) {
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    sx += ens.xi[i] * drifts[i].x;
    sy += ens.xi[i] * drifts[i].y;
  }
  if (std::abs(sx) > 1e-12 || std::abs(sy) > 1e-12) {
    throw std::runtime_error(
        "pairwise drift cancellation violated at step " +
        std::to_string(step_index) + ": |sum| = " +
        std::to_string(std::hypot(sx, sy)));
  }
}

}  // namespace

std::vector<Vec2> drift(const VortexEnsemble& ens,
                        const MollifiedKernel& kernel) {
  return interaction_drift(ens, kernel, canonical_order(ens));
}

void step(VortexEnsemble& ens, const SimulationConfig& cfg,
          std::uint64_t step_index) {
  const int n = static_cast<int>(ens.size());
  std::vector<double> dw;
  cfg.path->increments(cfg.dt, step_index, dw);
  const std::vector<int> order = canonical_order(ens);
  const std::vector<Vec2> b0 = interaction_drift(ens, *cfg.kernel, order);
  if (cfg.debug_pair_check) check_pair_cancellation(ens, b0, step_index);
  const bool add_strat = !cfg.noise->modes().empty();

  if (cfg.integrator == Integrator::euler_maruyama) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      const TorusPoint p{ens.x1[i], ens.x2[i]};
      Vec2 incr = b0[i];
      if (add_strat) incr += cfg.noise->strat_correction(p);
      incr = incr * cfg.dt;
      incr += cfg.noise->weighted_sum(p, dw);
      const TorusPoint q = wrap(p.x1 + incr.x, p.x2 + incr.y);
      ens.x1[i] = q.x1;
      ens.x2[i] = q.x2;
    }
  } else {
    // Heun: midpoint predictor-corrector on drift and noise coefficients.
    VortexEnsemble pred = ens;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      const TorusPoint p{ens.x1[i], ens.x2[i]};
      const Vec2 incr = b0[i] * cfg.dt + cfg.noise->weighted_sum(p, dw);
      const TorusPoint q = wrap(p.x1 + incr.x, p.x2 + incr.y);
      pred.x1[i] = q.x1;
      pred.x2[i] = q.x2;
    }
    const std::vector<Vec2> b1 =
        interaction_drift(pred, *cfg.kernel, canonical_order(pred));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      const TorusPoint p{ens.x1[i], ens.x2[i]};
      const TorusPoint ps{pred.x1[i], pred.x2[i]};
      const Vec2 bm = (b0[i] + b1[i]) * 0.5;
      const Vec2 sm = (cfg.noise->weighted_sum(p, dw) +
                       cfg.noise->weighted_sum(ps, dw)) *
                      0.5;
      const TorusPoint q =
          wrap(p.x1 + bm.x * cfg.dt + sm.x, p.x2 + bm.y * cfg.dt + sm.y);
      ens.x1[i] = q.x1;
      ens.x2[i] = q.x2;
    }
  }
  check_finite(ens, step_index);
}

const VortexEnsemble& Trajectory::at_time(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) {
      return snapshots[i];
    }
  }
  throw std::out_of_range("Trajectory::at_time: no snapshot at requested time");
}

Trajectory simulate(VortexEnsemble initial, const SimulationConfig& cfg) {
  cfg.validate();
  const std::uint64_t nsteps = cfg.steps();
  Trajectory traj;
  initial.t = 0.0;
  traj.times.push_back(0.0);
  traj.snapshots.push_back(initial);
  VortexEnsemble state = std::move(initial);
  for (std::uint64_t j = 0; j < nsteps; ++j) {
    step(state, cfg, j);
    state.t = static_cast<double>(j + 1) * cfg.dt;
    const bool save = (cfg.save_every > 0 && (j + 1) % cfg.save_every == 0) ||
                      (j + 1 == nsteps);
    if (save) {
      traj.times.push_back(state.t);
      traj.snapshots.push_back(state);
    }
  }
  return traj;
}

TracerSet TracerSet::grid(int per_side) {
  TracerSet out;
  const double h = kTorusLength / per_side;
  for (int i = 0; i < per_side; ++i) {
    for (int j = 0; j < per_side; ++j) {
      out.x1.push_back(i * h);
      out.x2.push_back(j * h);
    }
  }
  return out;
}

const TracerSet& TracerTrajectory::at_time(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) {
      return snapshots[i];
    }
  }
  throw std::out_of_range(
      "TracerTrajectory::at_time: no snapshot at requested time");
}

TracerTrajectory advect_tracers(const TracerSet& tracers, const Trajectory& traj,
                                const SimulationConfig& cfg) {
  if (tracers.size() == 0) {
    throw std::invalid_argument("advect_tracers: empty tracer set");
  }
  cfg.validate();
  const std::uint64_t nsteps = cfg.steps();
  if (traj.snapshots.size() != nsteps + 1) {
    throw std::invalid_argument(
        "advect_tracers: need an every-step ensemble trajectory");
  }
  TracerTrajectory out;
  out.times.push_back(0.0);
  out.snapshots.push_back(tracers);
  TracerSet state = tracers;
  std::vector<double> dw;
  const int nt = static_cast<int>(state.size());
  for (std::uint64_t j = 0; j < nsteps; ++j) {
    const VortexEnsemble& ens = traj.snapshots[j];
    const std::vector<int> order = canonical_order(ens);
    cfg.path->increments(cfg.dt, j, dw);
    if (cfg.integrator == Integrator::euler_maruyama) {
#pragma omp parallel for schedule(static)
      for (int i = 0; i < nt; ++i) {
        const TorusPoint p = state.position(i);
        const Vec2 b = field_drift(p, ens, *cfg.kernel, order);
        Vec2 incr = b;
        if (!cfg.noise->modes().empty()) {
          incr += cfg.noise->strat_correction(p);
        }
        incr = incr * cfg.dt;
        incr += cfg.noise->weighted_sum(p, dw);
        const TorusPoint q = wrap(p.x1 + incr.x, p.x2 + incr.y);
        state.x1[i] = q.x1;
        state.x2[i] = q.x2;
      }
    } else {
      // Heun: the ensemble predictor is recomputed so that tracer paths
      // coincide with particle paths under the same discretization.
      VortexEnsemble pred = ens;
      const std::vector<Vec2> b0 = interaction_drift(ens, *cfg.kernel, order);
      const int n = static_cast<int>(ens.size());
#pragma omp parallel for schedule(static)
      for (int i = 0; i < n; ++i) {
        const TorusPoint p{ens.x1[i], ens.x2[i]};
        const Vec2 incr = b0[i] * cfg.dt + cfg.noise->weighted_sum(p, dw);
        const TorusPoint q = wrap(p.x1 + incr.x, p.x2 + incr.y);
        pred.x1[i] = q.x1;
        pred.x2[i] = q.x2;
      }
      const std::vector<int> order_pred = canonical_order(pred);
#pragma omp parallel for schedule(static)
      for (int i = 0; i < nt; ++i) {
        const TorusPoint p = state.position(i);
        const Vec2 bp = field_drift(p, ens, *cfg.kernel, order);
        const Vec2 sp = cfg.noise->weighted_sum(p, dw);
        const TorusPoint mid = wrap(p.x1 + bp.x * cfg.dt + sp.x,
                                    p.x2 + bp.y * cfg.dt + sp.y);
        const Vec2 bm =
            (bp + field_drift(mid, pred, *cfg.kernel, order_pred)) * 0.5;
        const Vec2 sm = (sp + cfg.noise->weighted_sum(mid, dw)) * 0.5;
        const TorusPoint q =
            wrap(p.x1 + bm.x * cfg.dt + sm.x, p.x2 + bm.y * cfg.dt + sm.y);
        state.x1[i] = q.x1;
        state.x2[i] = q.x2;
      }
    }
    for (int i = 0; i < nt; ++i) {
      if (!std::isfinite(state.x1[i]) || !std::isfinite(state.x2[i])) {
        throw std::runtime_error("tracer advection diverged at step " +
                                 std::to_string(j));
      }
    }
    const bool save = (cfg.save_every > 0 && (j + 1) % cfg.save_every == 0) ||
                      (j + 1 == nsteps);
    if (save) {
      out.times.push_back(static_cast<double>(j + 1) * cfg.dt);
      out.snapshots.push_back(state);
    }
  }
  return out;
}

}  // namespace vortexmf
