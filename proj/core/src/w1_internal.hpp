#pragma once

#include <vector>

#include "vortexmf/measures.hpp"

namespace vortexmf::detail {

struct W1ProblemData {
  std::vector<TorusPoint> pts;
  std::vector<double> c;
};

inline W1ProblemData w1_difference_data(const SignedAtomicMeasure& mu,
                                        const SignedAtomicMeasure& nu) {
  const SignedAtomicMeasure diff = measure_difference(mu, nu);
  W1ProblemData d;
  d.pts.reserve(diff.size());
  d.c.reserve(diff.size());
  for (const auto& a : diff.atoms()) {
    d.pts.push_back(a.pos);
    d.c.push_back(a.weight);
  }
  return d;
}

/// One inner solve of the unbalanced min-cost flow behind the BL_1 dual at a
/// fixed budget split (s, ell): transport arcs cost ell*d_ij (pruned
/// losslessly to d_ij <= 2s/ell, degree-capped), mass creation/deletion costs
/// s through a dummy node.
struct FlowOutcome {
  double cost{0.0};    // ell*sum_dT + s*sum_r; a valid upper bound on G(s)
  double sum_r{0.0};   // created+destroyed mass
  double sum_dT{0.0};  // unscaled transported mass-distance
  std::vector<double> phi;  // node potentials (primal candidate, pre-repair)
  bool complete{true};
};

FlowOutcome solve_unbalanced_flow(const std::vector<TorusPoint>& pts,
                                  const std::vector<double>& c, double s,
                                  double ell, int max_degree);

}  // namespace vortexmf::detail
