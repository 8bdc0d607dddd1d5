#pragma once

#include <functional>
#include <span>
#include <vector>

#include "vortexmf/torus.hpp"

namespace vortexmf {

struct WeightedAtom {
  TorusPoint pos;
  double weight{0.0};
};

/// Finite signed measure with atomic support. Atoms within 1e-12 of each
/// other are merged at construction (weights summed; exact-zero results are
/// dropped). Immutable value type.
class SignedAtomicMeasure {
 public:
  SignedAtomicMeasure() = default;
  explicit SignedAtomicMeasure(std::vector<WeightedAtom> atoms);

  std::span<const WeightedAtom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  /// Total variation sum |weights| (after merging).
  double tv_norm() const { return tv_; }
  /// Signed total mass mu(T^2).
  double total_mass() const { return mass_; }

  /// Transport every atom by `map`, preserving weights; coincident images
  /// merge, so the total variation cannot increase.
  SignedAtomicMeasure pushforward(
      const std::function<TorusPoint(const TorusPoint&)>& map) const;

 private:
  std::vector<WeightedAtom> atoms_;
  double tv_{0.0};
  double mass_{0.0};
};

/// Atom-merged difference mu - nu (the W1 problem data).
SignedAtomicMeasure measure_difference(const SignedAtomicMeasure& mu,
                                       const SignedAtomicMeasure& nu);

/// sup_t e^{-ct} W1(mu_t, nu_t)^p along one realization's common sample
/// times. Throws on mismatched time grids.
double path_sup_distance(std::span<const SignedAtomicMeasure> mu_path,
                         std::span<const SignedAtomicMeasure> nu_path,
                         std::span<const double> mu_times,
                         std::span<const double> nu_times, double p, double c,
                         const std::function<double(const SignedAtomicMeasure&,
                                                    const SignedAtomicMeasure&)>&
                             w1);

/// Combine per-realization sup values into d_p: (mean)^(1/p).
double combine_dp(std::span<const double> per_realization, double p);

}  // namespace vortexmf
