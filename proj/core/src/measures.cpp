#include "vortexmf/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vortexmf {

namespace {

constexpr double kMergeTol = 1e-12;

std::vector<WeightedAtom> merge_atoms(std::vector<WeightedAtom> atoms) {
  for (const auto& a : atoms) {
    if (!std::isfinite(a.pos.x1) || !std::isfinite(a.pos.x2) ||
        !std::isfinite(a.weight)) {
      throw std::invalid_argument("SignedAtomicMeasure: non-finite atom");
    }
  }
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) {
    if (a.pos.x1 != b.pos.x1) return a.pos.x1 < b.pos.x1;
    return a.pos.x2 < b.pos.x2;
  });
  std::vector<WeightedAtom> merged;
  merged.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (!merged.empty()) {
      auto& m = merged.back();
      if (std::abs(a.pos.x1 - m.pos.x1) <= kMergeTol &&
          std::abs(a.pos.x2 - m.pos.x2) <= kMergeTol) {
        m.weight += a.weight;
        continue;
      }
    }
    merged.push_back(a);
  }
  std::erase_if(merged, [](const WeightedAtom& a) { return a.weight == 0.0; });
  return merged;
}

}  // namespace

SignedAtomicMeasure::SignedAtomicMeasure(std::vector<WeightedAtom> atoms)
    : atoms_(merge_atoms(std::move(atoms))) {
  for (const auto& a : atoms_) {
    tv_ += std::abs(a.weight);
    mass_ += a.weight;
  }
}

SignedAtomicMeasure SignedAtomicMeasure::pushforward(
    const std::function<TorusPoint(const TorusPoint&)>& map) const {
  std::vector<WeightedAtom> moved;
  moved.reserve(atoms_.size());
  for (const auto& a : atoms_) {
    moved.push_back({map(a.pos), a.weight});
  }
  return SignedAtomicMeasure(std::move(moved));
}

SignedAtomicMeasure measure_difference(const SignedAtomicMeasure& mu,
                                       const SignedAtomicMeasure& nu) {
  std::vector<WeightedAtom> atoms;
  atoms.reserve(mu.size() + nu.size());
  for (const auto& a : mu.atoms()) atoms.push_back(a);
  for (const auto& a : nu.atoms()) atoms.push_back({a.pos, -a.weight});
  return SignedAtomicMeasure(std::move(atoms));
}

double path_sup_distance(
    std::span<const SignedAtomicMeasure> mu_path,
    std::span<const SignedAtomicMeasure> nu_path,
    std::span<const double> mu_times, std::span<const double> nu_times,
    double p, double c,
    const std::function<double(const SignedAtomicMeasure&,
                               const SignedAtomicMeasure&)>& w1) {
  if (p < 1.0) throw std::invalid_argument("path_sup_distance: p < 1");
  if (c < 0.0) throw std::invalid_argument("path_sup_distance: c < 0");
  if (mu_path.size() != mu_times.size() || nu_path.size() != nu_times.size() ||
      mu_times.size() != nu_times.size()) {
    throw std::invalid_argument("path_sup_distance: mismatched time grids");
  }
  for (std::size_t i = 0; i < mu_times.size(); ++i) {
    if (std::abs(mu_times[i] - nu_times[i]) > 1e-12) {
      throw std::invalid_argument("path_sup_distance: mismatched time grids");
    }
  }
  double sup = 0.0;
  for (std::size_t i = 0; i < mu_times.size(); ++i) {
    const double w = w1(mu_path[i], nu_path[i]);
    sup = std::max(sup, std::exp(-c * mu_times[i]) * std::pow(w, p));
  }
  return sup;
}

double combine_dp(std::span<const double> per_realization, double p) {
  if (per_realization.empty()) return 0.0;
  double acc = 0.0;
  for (double v : per_realization) acc += v;
  return std::pow(acc / static_cast<double>(per_realization.size()), 1.0 / p);
}

}  // namespace vortexmf
