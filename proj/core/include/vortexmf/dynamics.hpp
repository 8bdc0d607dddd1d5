#pragma once

#include <cstdint>
#include <vector>

#include "vortexmf/kernels.hpp"
#include "vortexmf/measures.hpp"
#include "vortexmf/noise.hpp"
#include "vortexmf/torus.hpp"

namespace vortexmf {

enum class Integrator { euler_maruyama, heun_stratonovich };

/// N interacting point vortices: positions plus constant-in-time signed
/// intensities. The weighted empirical measure (1/N) sum xi_i delta_{X_i} is
/// the object the convergence experiments track.
struct VortexEnsemble {
  std::vector<double> x1, x2, xi;
  double eps{0.0};
  double t{0.0};

  static VortexEnsemble create(std::vector<double> x1, std::vector<double> x2,
                               std::vector<double> xi, double eps,
                               double tv_budget);

  std::size_t size() const { return x1.size(); }
  TorusPoint position(std::size_t i) const { return {x1[i], x2[i]}; }
  /// (1/N) sum |xi_i|; constant along trajectories.
  double tv() const;
  /// Atoms at particle positions with weights xi_i / N.
  SignedAtomicMeasure empirical_measure() const;
};

struct SimulationConfig {
  double dt{1e-3};
  double T{1.0};
  Integrator integrator{Integrator::euler_maruyama};
  double tv_budget{20.0};  // M
  int save_every{0};       // 0: keep only t = 0 and t = T
  const MollifiedKernel* kernel{nullptr};
  const NoiseModel* noise{nullptr};
  const BrownianPath* path{nullptr};
  /// Verify the xi-weighted pairwise drift cancellation every step.
  bool debug_pair_check{false};

  void validate() const;
  std::uint64_t steps() const;
};

/// Interaction drift (1/N) sum_{j != i} xi_j K^eps(X_i - X_j). The j-sum runs
/// in a canonical order (particles sorted by position, then intensity), so the
/// result is independent of particle indexing and of the thread count.
std::vector<Vec2> drift(const VortexEnsemble& ens, const MollifiedKernel& kernel);

/// One Euler-Maruyama or Heun step in place, consuming the shared Brownian
/// increments for `step_index`. Throws if the state leaves the finite range.
void step(VortexEnsemble& ens, const SimulationConfig& cfg,
          std::uint64_t step_index);

struct Trajectory {
  std::vector<double> times;
  std::vector<VortexEnsemble> snapshots;

  const VortexEnsemble& at_time(double t) const;
};

Trajectory simulate(VortexEnsemble initial, const SimulationConfig& cfg);

/// Passive points advected by the ensemble-generated velocity field plus the
/// same noise increments; realizes the mean-field flow map at sample points.
struct TracerSet {
  std::vector<double> x1, x2;

  static TracerSet grid(int per_side);
  std::size_t size() const { return x1.size(); }
  TorusPoint position(std::size_t i) const { return {x1[i], x2[i]}; }
};

struct TracerTrajectory {
  std::vector<double> times;
  std::vector<TracerSet> snapshots;

  const TracerSet& at_time(double t) const;
};

/// Requires an every-step ensemble trajectory (save_every == 1). Tracers do
/// not influence the ensemble; a tracer seeded exactly at a vortex position
/// reproduces that vortex's discrete path.
TracerTrajectory advect_tracers(const TracerSet& tracers, const Trajectory& traj,
                                const SimulationConfig& cfg);

}  // namespace vortexmf
