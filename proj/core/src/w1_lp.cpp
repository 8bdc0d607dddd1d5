#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vortexmf/w1.hpp"

namespace vortexmf {

namespace {

// The LP dual of the BL_1 problem is an unbalanced transportation problem:
//
//   min w   s.t.   y+_i - y-_i + sum_j (T_ij - T_ji) = c_i      (row i)
//                  sum_i (y+_i + y-_i) - w + v_s = 0            (row m)
//                  sum_ij d_ij T_ij    - w + v_l = 0            (row m+1)
//                  all variables >= 0,
//
// i.e. the best test function value equals the cheapest way to cancel the
// charge c by moving mass (paying the Lipschitz budget per unit distance) or
// creating/destroying it (paying the sup budget per unit), with w the worse
// of the two budget totals. Row duals recover (phi, s, l).
//
// Solved by a dense-tableau primal simplex with Dantzig pricing, a Bland
// fallback against cycling, and T-column generation against the O(m^2) pair
// set. The initial basis (sign-matched y per atom row, w, v_l) is feasible,
// so no phase-1 is needed.

struct Column {
  // sparse rows: at most three entries
  int r[3];
  double a[3];
  int nnz{0};
  double cost{0.0};
  int arc_i{-1};
  int arc_j{-1};
};

struct LpResult {
  double value{0.0};
  std::vector<double> duals;  // size m+2
};

class Tableau {
 public:
  Tableau(int nrows, const std::vector<Column>& cols,
          const std::vector<double>& rhs, const std::vector<int>& basis)
      : nrows_(nrows),
        ncols_(static_cast<int>(cols.size())),
        width_(ncols_ + 1),
        basis_(basis),
        t_(static_cast<std::size_t>(nrows + 1) * (ncols_ + 1), 0.0) {
    for (int c = 0; c < ncols_; ++c) {
      for (int k = 0; k < cols[c].nnz; ++k) {
        at(cols[c].r[k], c) = cols[c].a[k];
      }
      at(nrows_, c) = cols[c].cost;
    }
    for (int r = 0; r < nrows_; ++r) at(r, ncols_) = rhs[r];
    for (int r = 0; r < nrows_; ++r) pivot(r, basis_[r]);
  }

  double& at(int r, int c) { return t_[static_cast<std::size_t>(r) * width_ + c]; }
  double at(int r, int c) const {
    return t_[static_cast<std::size_t>(r) * width_ + c];
  }

  void pivot(int r, int c) {
    double* prow = &t_[static_cast<std::size_t>(r) * width_];
    const double pv = prow[c];
    if (std::abs(pv) < 1e-12) throw std::runtime_error("w1 simplex: bad pivot");
    const double inv = 1.0 / pv;
    for (int j = 0; j <= ncols_; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (int r2 = 0; r2 <= nrows_; ++r2) {
      if (r2 == r) continue;
      double* row = &t_[static_cast<std::size_t>(r2) * width_];
      const double f = row[c];
      if (f == 0.0) continue;
      for (int j = 0; j <= ncols_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    basis_[r] = c;
  }

  // Returns false when already optimal.
  bool iterate(bool bland) {
    int enter = -1;
    double best = -1e-10;
    if (bland) {
      for (int c = 0; c < ncols_; ++c) {
        if (at(nrows_, c) < -1e-10) {
          enter = c;
          break;
        }
      }
    } else {
      for (int c = 0; c < ncols_; ++c) {
        const double rc = at(nrows_, c);
        if (rc < best) {
          best = rc;
          enter = c;
        }
      }
    }
    if (enter < 0) return false;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < nrows_; ++r) {
      const double a = at(r, enter);
      if (a > 1e-11) {
        const double ratio = at(r, ncols_) / a;
        if (ratio < best_ratio - 1e-13 ||
            (ratio < best_ratio + 1e-13 &&
             (leave < 0 || basis_[r] < basis_[leave]))) {
          best_ratio = ratio;
          leave = r;
        }
      }
    }
    if (leave < 0) throw std::runtime_error("w1 simplex: unbounded");
    pivot(leave, enter);
    return true;
  }

  LpResult solve() {
    int stall = 0;
    double last = objective();
    for (long iter = 0; iter < 2000000; ++iter) {
      if (!iterate(stall > 64)) {
        LpResult out;
        out.value = objective();
        out.duals.resize(nrows_);
        return out;
      }
      const double now = objective();
      stall = (now < last - 1e-13) ? 0 : stall + 1;
      last = now;
    }
    throw std::runtime_error("w1 simplex: iteration cap exceeded");
  }

  double objective() const { return -at(nrows_, ncols_); }
  double reduced_cost(int c) const { return at(nrows_, c); }

 private:
  int nrows_, ncols_, width_;
  std::vector<int> basis_;
  std::vector<double> t_;
};

struct ProblemData {
  std::vector<TorusPoint> pts;
  std::vector<double> c;
};

ProblemData difference_data(const SignedAtomicMeasure& mu,
                            const SignedAtomicMeasure& nu) {
  const SignedAtomicMeasure diff = measure_difference(mu, nu);
  ProblemData d;
  d.pts.reserve(diff.size());
  d.c.reserve(diff.size());
  for (const auto& a : diff.atoms()) {
    d.pts.push_back(a.pos);
    d.c.push_back(a.weight);
  }
  return d;
}

Column y_plus(int i, int m) {
  Column col;
  col.r[0] = i;
  col.a[0] = 1.0;
  col.r[1] = m;
  col.a[1] = 1.0;
  col.nnz = 2;
  return col;
}

Column y_minus(int i, int m) {
  Column col;
  col.r[0] = i;
  col.a[0] = -1.0;
  col.r[1] = m;
  col.a[1] = 1.0;
  col.nnz = 2;
  return col;
}

Column arc_col(int i, int j, double d, int m) {
  Column col;
  col.r[0] = i;
  col.a[0] = 1.0;
  col.r[1] = j;
  col.a[1] = -1.0;
  col.r[2] = m + 1;
  col.a[2] = d;
  col.nnz = 3;
  col.arc_i = i;
  col.arc_j = j;
  return col;
}

// Seed arc set: symmetric k-nearest-neighbour pairs (both directions).
std::vector<std::pair<int, int>> knn_pairs(const std::vector<TorusPoint>& pts,
                                           int k) {
  const int m = static_cast<int>(pts.size());
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::pair<double, int>> cand;
  for (int i = 0; i < m; ++i) {
    cand.clear();
    for (int j = 0; j < m; ++j) {
      if (j != i) cand.emplace_back(torus_dist(pts[i], pts[j]), j);
    }
    const int kk = std::min<int>(k, static_cast<int>(cand.size()));
    std::partial_sort(cand.begin(), cand.begin() + kk, cand.end());
    for (int q = 0; q < kk; ++q) {
      const int j = cand[q].second;
      pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

W1Solution solve_lp(const ProblemData& data) {
  const int m = static_cast<int>(data.pts.size());
  W1Solution sol;
  if (m == 0) return sol;

  const int nrows = m + 2;
  std::vector<double> rhs(nrows, 0.0);
  for (int i = 0; i < m; ++i) rhs[i] = data.c[i];

  std::vector<Column> cols;
  std::vector<int> basis(nrows);
  cols.reserve(2 * m + 3);
  for (int i = 0; i < m; ++i) cols.push_back(y_plus(i, m));
  for (int i = 0; i < m; ++i) cols.push_back(y_minus(i, m));
  Column wcol;
  wcol.r[0] = m;
  wcol.a[0] = -1.0;
  wcol.r[1] = m + 1;
  wcol.a[1] = -1.0;
  wcol.nnz = 2;
  wcol.cost = 1.0;
  cols.push_back(wcol);
  Column vs;
  vs.r[0] = m;
  vs.a[0] = 1.0;
  vs.nnz = 1;
  cols.push_back(vs);
  Column vl;
  vl.r[0] = m + 1;
  vl.a[0] = 1.0;
  vl.nnz = 1;
  cols.push_back(vl);
  const int w_idx = 2 * m;
  const int vs_idx = 2 * m + 1;
  const int vl_idx = 2 * m + 2;

  for (int i = 0; i < m; ++i) basis[i] = (data.c[i] >= 0.0) ? i : m + i;
  basis[m] = w_idx;
  basis[m + 1] = vl_idx;

  auto dist = [&](int i, int j) { return torus_dist(data.pts[i], data.pts[j]); };

  std::vector<std::pair<int, int>> active;
  const bool enumerate_all = m <= 120;
  if (enumerate_all) {
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) active.emplace_back(i, j);
    }
  } else {
    active = knn_pairs(data.pts, 12);
  }
  auto add_pairs = [&](const std::vector<std::pair<int, int>>& pairs) {
    for (auto [i, j] : pairs) {
      const double d = dist(i, j);
      cols.push_back(arc_col(i, j, d, m));
      cols.push_back(arc_col(j, i, d, m));
    }
  };
  add_pairs(active);

  std::vector<char> have(static_cast<std::size_t>(m) * m, 0);
  for (auto [i, j] : active) {
    have[static_cast<std::size_t>(i) * m + j] = 1;
  }

  LpResult lp;
  std::vector<double> duals(nrows, 0.0);
  for (int round = 0;; ++round) {
    Tableau tab(nrows, cols, rhs, basis);
    lp = tab.solve();
    // Row duals from reduced costs of always-active structural columns:
    // pi_s = -rc(v_s), pi_l = -rc(v_l), pi_i = -rc(y+_i) - pi_s.
    const double pi_s = -tab.reduced_cost(vs_idx);
    const double pi_l = -tab.reduced_cost(vl_idx);
    for (int i = 0; i < m; ++i) duals[i] = -tab.reduced_cost(i) - pi_s;
    duals[m] = pi_s;
    duals[m + 1] = pi_l;

    if (enumerate_all || round >= 24) break;
    std::vector<std::pair<double, std::pair<int, int>>> violated;
    const double tol = 1e-9 * std::max(1.0, lp.value);
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        if (have[static_cast<std::size_t>(i) * m + j]) continue;
        const double d = dist(i, j);
        const double slack = -pi_l * d - std::abs(duals[i] - duals[j]);
        if (slack < -tol) violated.push_back({slack, {i, j}});
      }
    }
    if (violated.empty()) break;
    std::sort(violated.begin(), violated.end());
    const std::size_t batch = std::min<std::size_t>(violated.size(), 4 * m);
    std::vector<std::pair<int, int>> fresh;
    for (std::size_t q = 0; q < batch; ++q) {
      fresh.push_back(violated[q].second);
      have[static_cast<std::size_t>(violated[q].second.first) * m +
           violated[q].second.second] = 1;
    }
    add_pairs(fresh);
  }

  sol.value = lp.value;
  sol.sup_budget = -duals[m];
  sol.lip_budget = -duals[m + 1];
  sol.potential.reserve(m);
  for (int i = 0; i < m; ++i) {
    sol.potential.push_back({data.pts[i], duals[i]});
  }
  return sol;
}

}  // namespace

W1Solution w1_bl_solution(const SignedAtomicMeasure& mu,
                          const SignedAtomicMeasure& nu) {
  ProblemData data = difference_data(mu, nu);
  if (data.pts.size() > 10000) {
    throw std::invalid_argument(
        "w1_bl: more than 10^4 combined atoms; use w1_dual_ascent");
  }
  return solve_lp(data);
}

double w1_bl(const SignedAtomicMeasure& mu, const SignedAtomicMeasure& nu) {
  return w1_bl_solution(mu, nu).value;
}

double w1_auto(const SignedAtomicMeasure& mu, const SignedAtomicMeasure& nu,
               double tol, std::size_t exact_atom_limit) {
  if (mu.size() + nu.size() <= exact_atom_limit) return w1_bl(mu, nu);
  return w1_dual_ascent(mu, nu, tol).value();
}

}  // namespace vortexmf
