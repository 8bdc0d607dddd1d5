#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "vortexmf/w1.hpp"
#include "w1_internal.hpp"

namespace vortexmf {

namespace detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Torus-aware bucket grid for radius-limited neighbour enumeration.
class HashGrid {
 public:
  HashGrid(const std::vector<TorusPoint>& pts, double radius) {
    nb_ = std::clamp(static_cast<int>(kTorusLength / std::max(radius, 1e-6)),
                     1, 128);
    cw_ = kTorusLength / nb_;
    cells_.assign(static_cast<std::size_t>(nb_) * nb_, {});
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      cells_[cell_of(pts[i])].push_back(i);
    }
  }

  template <typename F>
  void for_neighbors(const TorusPoint& p, F&& fn) const {
    if (nb_ < 3) {
      for (const auto& cell : cells_) {
        for (int idx : cell) fn(idx);
      }
      return;
    }
    const int ci = coord(p.x1);
    const int cj = coord(p.x2);
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        const int ii = (ci + di + nb_) % nb_;
        const int jj = (cj + dj + nb_) % nb_;
        for (int idx : cells_[static_cast<std::size_t>(ii) * nb_ + jj]) fn(idx);
      }
    }
  }

  /// Expanding square rings around p; fn(idx) returns true to stop. Ring r
  /// holds candidates at roughly distance r*cell_width.
  template <typename F>
  void for_rings(const TorusPoint& p, F&& fn) const {
    const int ci = coord(p.x1);
    const int cj = coord(p.x2);
    const int max_ring = nb_ / 2 + 1;
    for (int ring = 0; ring <= max_ring; ++ring) {
      for (int di = -ring; di <= ring; ++di) {
        for (int dj = -ring; dj <= ring; ++dj) {
          if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
          if (ring > nb_) continue;
          const int ii = (ci + di % nb_ + nb_) % nb_;
          const int jj = (cj + dj % nb_ + nb_) % nb_;
          for (int idx : cells_[static_cast<std::size_t>(ii) * nb_ + jj]) {
            if (fn(idx)) return;
          }
        }
      }
    }
  }

 private:
  int coord(double x) const {
    int c = static_cast<int>(x / cw_);
    if (c >= nb_) c = nb_ - 1;
    if (c < 0) c = 0;
    return c;
  }
  std::size_t cell_of(const TorusPoint& p) const {
    return static_cast<std::size_t>(coord(p.x1)) * nb_ + coord(p.x2);
  }

  int nb_;
  double cw_;
  std::vector<std::vector<int>> cells_;
};

struct Graph {
  // Arcs stored in twin pairs: twin(a) = a ^ 1.
  std::vector<int> to;
  std::vector<double> cost;
  std::vector<double> dist;  // unscaled torus distance (0 for dummy arcs)
  std::vector<double> flow;
  std::vector<int> first;  // adjacency heads per node
  std::vector<int> next;   // per-arc chain

  void add_pair(int u, int v, double arc_cost, double d) {
    const int a = static_cast<int>(to.size());
    to.push_back(v);
    cost.push_back(arc_cost);
    dist.push_back(d);
    flow.push_back(0.0);
    next.push_back(first[u]);
    first[u] = a;
    to.push_back(u);
    cost.push_back(arc_cost);
    dist.push_back(d);
    flow.push_back(0.0);
    next.push_back(first[v]);
    first[v] = a + 1;
  }
};

}  // namespace

FlowOutcome solve_unbalanced_flow(const std::vector<TorusPoint>& pts,
                                  const std::vector<double>& c, double s,
                                  double ell, int max_degree) {
  const int m = static_cast<int>(pts.size());
  const int dummy = m;
  FlowOutcome out;
  out.phi.assign(m, 0.0);
  if (m == 0) return out;

  double tv = 0.0;
  for (double v : c) tv += std::abs(v);
  const double tol_e = 1e-13 * std::max(1.0, tv);

  // Lossless prune: an arc with ell*d > 2s is dominated by dump+fill.
  const double diam = 0.5 * kTorusLength * std::numbers::sqrt2;
  const double radius =
      (ell > 1e-12) ? std::min(2.0 * s / ell + 1e-12, diam) : diam;

  Graph g;
  g.first.assign(m + 1, -1);
  {
    HashGrid grid(pts, radius);
    std::vector<std::pair<double, int>> cand;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < m; ++i) {
      cand.clear();
      grid.for_neighbors(pts[i], [&](int j) {
        if (j <= i) return;
        const double d = torus_dist(pts[i], pts[j]);
        if (d <= radius) cand.emplace_back(d, j);
      });
      if (static_cast<int>(cand.size()) > max_degree) {
        std::nth_element(cand.begin(), cand.begin() + max_degree, cand.end());
        cand.resize(max_degree);
      }
      for (const auto& [d, j] : cand) edges.emplace_back(i, j);
    }
    for (const auto& [i, j] : edges) {
      const double d = torus_dist(pts[i], pts[j]);
      g.add_pair(i, j, ell * d, d);
    }
    for (int i = 0; i < m; ++i) g.add_pair(i, dummy, s, 0.0);
  }

  std::vector<double> excess(m + 1, 0.0);
  double net = 0.0;
  for (int i = 0; i < m; ++i) {
    excess[i] = c[i];
    net += c[i];
  }
  excess[dummy] = -net;

  std::vector<double> pi(m + 1, 0.0);
  std::vector<double> dist(m + 1);
  std::vector<char> done(m + 1);
  std::vector<int> cur(m + 1);
  std::vector<char> dead(m + 1);
  std::vector<char> on_stack(m + 1, 0);

  using QE = std::pair<double, int>;
  const int max_phases = 400;
  bool complete = false;
  int idle_phases = 0;

  for (int phase = 0; phase < max_phases; ++phase) {
    bool any_source = false;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(done.begin(), done.end(), 0);
    for (int v = 0; v <= m; ++v) {
      if (excess[v] > tol_e) {
        dist[v] = 0.0;
        pq.push({0.0, v});
        any_source = true;
      }
    }
    if (!any_source) {
      complete = true;
      break;
    }

    while (!pq.empty()) {
      const auto [du, u] = pq.top();
      pq.pop();
      if (done[u]) continue;
      done[u] = 1;
      for (int a = g.first[u]; a >= 0; a = g.next[a]) {
        const int v = g.to[a];
        if (done[v]) continue;
        // forward residual (uncapacitated)
        double rc = g.cost[a] + pi[u] - pi[v];
        if (rc < 0.0) rc = 0.0;
        if (du + rc < dist[v] - 1e-15) {
          dist[v] = du + rc;
          pq.push({dist[v], v});
        }
        // backward residual of the twin arc (undo flow v -> u)
        const int t = a ^ 1;
        if (g.flow[t] > 0.0) {
          double rcb = -g.cost[t] + pi[u] - pi[v];
          if (rcb < 0.0) rcb = 0.0;
          if (du + rcb < dist[v] - 1e-15) {
            dist[v] = du + rcb;
            pq.push({dist[v], v});
          }
        }
      }
    }

    double drain_limit = -1.0;
    for (int v = 0; v <= m; ++v) {
      if (excess[v] < -tol_e && dist[v] < kInf) {
        drain_limit = std::max(drain_limit, dist[v]);
      }
    }
    if (drain_limit < 0.0) break;  // deficits unreachable (over-capped graph)

    for (int v = 0; v <= m; ++v) {
      if (dist[v] < kInf) pi[v] += std::min(dist[v], drain_limit);
    }

    // Blocking DFS over tight residual arcs. All arc costs are positive, so
    // tight paths ascend in Dijkstra distance; on_stack guards against
    // rounding-induced revisits anyway.
    const double tight_tol = 1e-10 * std::max(1.0, s + ell);
    for (int v = 0; v <= m; ++v) cur[v] = g.first[v];
    std::fill(dead.begin(), dead.end(), 0);
    bool any_push = false;

    for (int src = 0; src <= m; ++src) {
      if (excess[src] <= tol_e) continue;
      bool src_alive = true;
      while (excess[src] > tol_e && src_alive) {
        std::vector<int> stack_node(1, src);
        std::vector<int> stack_arc;
        std::vector<char> stack_back;
        std::fill(on_stack.begin(), on_stack.end(), 0);
        on_stack[src] = 1;
        bool progress = false;
        while (!stack_node.empty()) {
          const int u = stack_node.back();
          if (u != src && excess[u] < -tol_e) {
            double amt = std::min(excess[src], -excess[u]);
            for (std::size_t k = 0; k < stack_arc.size(); ++k) {
              if (stack_back[k]) amt = std::min(amt, g.flow[stack_arc[k] ^ 1]);
            }
            if (amt <= tol_e * 1e-2) {
              src_alive = false;  // numerically stuck; next phase resumes
              break;
            }
            for (std::size_t k = 0; k < stack_arc.size(); ++k) {
              if (stack_back[k]) {
                g.flow[stack_arc[k] ^ 1] -= amt;
              } else {
                g.flow[stack_arc[k]] += amt;
              }
            }
            excess[src] -= amt;
            excess[u] += amt;
            progress = true;
            any_push = true;
            break;
          }
          int a = cur[u];
          bool advanced = false;
          for (; a >= 0; a = g.next[a]) {
            cur[u] = a;
            const int v = g.to[a];
            if (on_stack[v] || dead[v] || !done[v]) continue;
            const double rc_f = g.cost[a] + pi[u] - pi[v];
            bool take = false;
            bool backward = false;
            if (std::abs(rc_f) <= tight_tol) {
              take = true;
            } else {
              const int t = a ^ 1;
              if (g.flow[t] > 0.0 &&
                  std::abs(-g.cost[t] + pi[u] - pi[v]) <= tight_tol) {
                take = true;
                backward = true;
              }
            }
            if (take) {
              stack_node.push_back(v);
              stack_arc.push_back(a);
              stack_back.push_back(backward ? 1 : 0);
              on_stack[v] = 1;
              advanced = true;
              break;
            }
          }
          if (advanced) continue;
          cur[u] = a;  // -1: exhausted
          dead[u] = (u != src);
          on_stack[u] = 0;
          stack_node.pop_back();
          if (!stack_arc.empty()) {
            stack_arc.pop_back();
            stack_back.pop_back();
          }
          if (u == src) break;
        }
        if (!progress) break;
      }
    }
    idle_phases = any_push ? 0 : idle_phases + 1;
    if (idle_phases >= 2) break;
  }

  // Feasibility completion: dump any residual excess through the dummy node.
  double forced = 0.0;
  for (int i = 0; i < m; ++i) {
    if (std::abs(excess[i]) > 0.0) forced += std::abs(excess[i]);
  }
  out.complete = complete && forced <= m * tol_e;

  double sum_r = forced;
  double sum_dT = 0.0;
  for (std::size_t a = 0; a < g.to.size(); a += 2) {
    const double f = g.flow[a] + g.flow[a + 1];
    if (g.dist[a] > 0.0) {
      sum_dT += g.dist[a] * f;
    } else {
      sum_r += f;  // dummy arcs
    }
  }
  out.sum_r = sum_r;
  out.sum_dT = sum_dT;
  out.cost = ell * sum_dT + s * sum_r;
  for (int i = 0; i < m; ++i) out.phi[i] = pi[dummy] - pi[i];
  return out;
}

}  // namespace detail

namespace {

struct Line {
  double b{0.0};  // intercept
  double g{0.0};  // slope
  double at(double t) const { return b + g * t; }
};

double envelope_value(const std::vector<Line>& lines, double t) {
  double v = std::numeric_limits<double>::max();
  for (const auto& l : lines) v = std::min(v, l.at(t));
  return v;
}

// Max of the lower envelope min_i(lines) over [lo, hi]; the envelope is
// concave, so the max sits at a pairwise intersection or an endpoint.
std::pair<double, double> envelope_max(const std::vector<Line>& lines,
                                       double lo, double hi) {
  double best_t = lo;
  double best_v = envelope_value(lines, lo);
  const double vhi = envelope_value(lines, hi);
  if (vhi > best_v) {
    best_v = vhi;
    best_t = hi;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const double dg = lines[i].g - lines[j].g;
      if (std::abs(dg) < 1e-15) continue;
      const double t = (lines[j].b - lines[i].b) / dg;
      if (t <= lo || t >= hi) continue;
      const double v = envelope_value(lines, t);
      if (v > best_v) {
        best_v = v;
        best_t = t;
      }
    }
  }
  return {best_t, best_v};
}

// McShane envelope regularization: the result is ell-Lipschitz for the torus
// metric and clipped to [-s, s], hence a feasible BL test function.
std::vector<double> repair_potential(const std::vector<TorusPoint>& pts,
                                     const std::vector<double>& phi, double s,
                                     double ell) {
  const int m = static_cast<int>(pts.size());
  std::vector<double> fixed(m);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    double v = phi[i];
    for (int j = 0; j < m; ++j) {
      const double cand = phi[j] + ell * torus_dist(pts[i], pts[j]);
      if (cand < v) v = cand;
    }
    fixed[i] = std::clamp(v, -s, s);
  }
  return fixed;
}

// Greedy transport of positive against negative charge: any feasible dual
// (T, r) supports G from above via t -> (1-t) sum_dT + t sum_r; this one is
// tight at s = 1 (its residual equals the net mass imbalance).
Line greedy_matching_line(const std::vector<TorusPoint>& pts,
                          const std::vector<double>& c) {
  const int m = static_cast<int>(pts.size());
  std::vector<double> rem(c);
  std::vector<int> negs;
  std::vector<TorusPoint> neg_pts;
  for (int i = 0; i < m; ++i) {
    if (rem[i] < 0.0) {
      negs.push_back(i);
      neg_pts.push_back(pts[i]);
    }
  }
  double sum_dT = 0.0;
  if (!negs.empty()) {
    detail::HashGrid grid(neg_pts, kTorusLength / 24.0);
    for (int i = 0; i < m; ++i) {
      while (rem[i] > 1e-15) {
        int pick = -1;
        grid.for_rings(pts[i], [&](int local) {
          if (rem[negs[local]] < 0.0) {
            pick = negs[local];
            return true;
          }
          return false;
        });
        if (pick < 0) break;
        const double amt = std::min(rem[i], -rem[pick]);
        rem[i] -= amt;
        rem[pick] += amt;
        sum_dT += amt * torus_dist(pts[i], pts[pick]);
      }
    }
  }
  double resid = 0.0;
  for (double v : rem) resid += std::abs(v);
  return {sum_dT, resid - sum_dT};
}

}  // namespace

W1Bracket w1_dual_ascent(const SignedAtomicMeasure& mu,
                         const SignedAtomicMeasure& nu, double tol,
                         int max_rounds) {
  if (!(tol > 0.0)) throw std::invalid_argument("w1_dual_ascent: tol <= 0");
  const detail::W1ProblemData data = detail::w1_difference_data(mu, nu);
  const int m = static_cast<int>(data.pts.size());
  W1Bracket out;
  if (m == 0) return out;

  double tv = 0.0, net = 0.0;
  for (double v : data.c) {
    tv += std::abs(v);
    net += v;
  }
  net = std::abs(net);

  std::vector<Line> lines;
  lines.push_back({0.0, tv});  // dump-everything dual, tight at s = 0
  lines.push_back({tv, 0.0});  // |phi| <= 1 cap
  lines.push_back(greedy_matching_line(data.pts, data.c));  // tight at s = 1

  const int max_degree = 24;
  double best_sample = std::max(0.0, net);  // phi == +-1 is feasible
  double best_s = -1.0;
  std::vector<std::pair<double, detail::FlowOutcome>> solved;
  solved.reserve(static_cast<std::size_t>(max_rounds) + 1);
  int best_idx = -1;

  for (int round = 0; round < max_rounds; ++round) {
    const auto [t_star, u_max] = envelope_max(lines, 0.0, 1.0);
    if (u_max - best_sample <= 0.45 * tol) break;
    const double s_next = std::clamp(t_star, 1e-6, 1.0 - 1e-6);
    bool repeated = false;
    for (const auto& [s_prev, fo] : solved) {
      if (std::abs(s_prev - s_next) < 1e-10) {
        repeated = true;
        break;
      }
    }
    if (repeated) break;
    detail::FlowOutcome fo = detail::solve_unbalanced_flow(
        data.pts, data.c, s_next, 1.0 - s_next, max_degree);
    lines.push_back({fo.sum_dT, fo.sum_r - fo.sum_dT});
    solved.emplace_back(s_next, std::move(fo));
    if (solved.back().second.cost > best_sample) {
      best_sample = solved.back().second.cost;
      best_s = s_next;
      best_idx = static_cast<int>(solved.size()) - 1;
    }
  }

  double lower = std::max(0.0, net);
  if (best_idx >= 0) {
    const double ell = 1.0 - best_s;
    const std::vector<double> phi =
        repair_potential(data.pts, solved[best_idx].second.phi, best_s, ell);
    double val = 0.0;
    for (int i = 0; i < m; ++i) val += data.c[i] * phi[i];
    lower = std::max(lower, val);
  }
  const auto [t_unused, u_max] = envelope_max(lines, 0.0, 1.0);
  out.lower = lower;
  out.upper = std::max(u_max, lower);
  out.converged = out.width() <= tol;
  return out;
}

double w1_lip_diagnostic(const SignedAtomicMeasure& mu,
                         const SignedAtomicMeasure& nu) {
  const detail::W1ProblemData data = detail::w1_difference_data(mu, nu);
  if (data.pts.size() > 2000) {
    throw std::invalid_argument("w1_lip_diagnostic: diagnostic-scale only");
  }
  double tv = 0.0, net = 0.0;
  for (double v : data.c) {
    tv += std::abs(v);
    net += v;
  }
  if (std::abs(net) > 1e-12 * std::max(1.0, tv)) {
    return std::numeric_limits<double>::infinity();
  }
  if (data.pts.empty()) return 0.0;
  // A dump cost beyond any transport cost reduces the flow to a balanced
  // Kantorovich problem; the Lip-only value is the transport term.
  const detail::FlowOutcome fo = detail::solve_unbalanced_flow(
      data.pts, data.c, kTorusLength, 1.0, static_cast<int>(data.pts.size()));
  return fo.sum_dT;
}

}  // namespace vortexmf
