#include "entot/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace entot {

CostMatrix CostMatrix::from_points(const std::vector<Vec>& a, const std::vector<Vec>& b,
                                   const CostFn& c) {
  CostMatrix cm;
  cm.n = static_cast<int>(a.size());
  cm.m = static_cast<int>(b.size());
  cm.entries.resize(static_cast<size_t>(cm.n) * cm.m);
  for (int i = 0; i < cm.n; ++i)
    for (int j = 0; j < cm.m; ++j) cm.entries[static_cast<size_t>(i) * cm.m + j] = c(a[i], b[j]);
  return cm;
}

CostMatrix CostMatrix::decomposable(const CostMatrix& c1, const CostMatrix& c2) {
  if (c1.n != c2.n || c1.m != c2.m)
    throw DimensionMismatch("decomposable cost: part shapes disagree");
  CostMatrix cm;
  cm.n = c1.n;
  cm.m = c1.m;
  cm.kind = CostKind::Decomposable;
  cm.part1 = c1.entries;
  cm.part2 = c2.entries;
  cm.entries.resize(cm.part1.size());
  for (size_t k = 0; k < cm.entries.size(); ++k) cm.entries[k] = cm.part1[k] + cm.part2[k];
  return cm;
}

CostMatrix CostMatrix::powered(double alpha) const {
  if (alpha == 1.0) {
    CostMatrix cm = *this;
    cm.kind = CostKind::Plain;
    cm.part1.clear();
    cm.part2.clear();
    return cm;
  }
  CostMatrix cm;
  cm.n = n;
  cm.m = m;
  cm.entries.resize(entries.size());
  for (size_t k = 0; k < entries.size(); ++k) cm.entries[k] = std::pow(entries[k], alpha);
  return cm;
}

namespace {

// Dense transportation network simplex. Basis is a spanning tree over
// n supply + m demand nodes; Dantzig pivoting with a Bland fallback after a
// degenerate stall guarantees termination.
class TransportSimplex {
 public:
  TransportSimplex(const Vec& a, const Vec& b, const std::vector<double>& cost, int n, int m)
      : n_(n), m_(m), num_nodes_(n + m), a_(a), b_(b), cost_(cost) {}

  void run() {
    init_northwest();
    double max_abs = 1.0;
    for (double c : cost_) max_abs = std::max(max_abs, std::fabs(c));
    const double enter_tol = 1e-12 * max_abs;
    const long max_pivots = 2000L * num_nodes_ + 20000L;
    long degenerate_streak = 0;
    bool bland = false;
    for (long pivot = 0;; ++pivot) {
      if (pivot > max_pivots) throw SolverError("transport simplex: pivot budget exhausted");
      build_tree();
      int ei = -1, ej = -1;
      if (!find_entering(enter_tol, bland, ei, ej)) break;
      double theta = apply_pivot(ei, ej);
      if (theta <= 0.0) {
        if (++degenerate_streak > 8L * num_nodes_ + 64L) bland = true;
      } else {
        degenerate_streak = 0;
      }
    }
  }

  Coupling extract() const {
    Coupling cp;
    cp.n = n_;
    cp.m = m_;
    cp.plan.assign(static_cast<size_t>(n_) * m_, 0.0);
    for (const BasicArc& arc : basis_) {
      double f = arc.flow < 0.0 ? 0.0 : arc.flow;  // clamp float dust
      cp.plan[static_cast<size_t>(arc.i) * m_ + arc.j] = f;
    }
    cp.row_marginal = a_;
    cp.col_marginal = b_;
    double obj = 0.0;
    for (const BasicArc& arc : basis_)
      obj += std::max(arc.flow, 0.0) * cost_[static_cast<size_t>(arc.i) * m_ + arc.j];
    cp.objective = obj;
    cp.dual_row.assign(pot_.begin(), pot_.begin() + n_);
    cp.dual_col.assign(pot_.begin() + n_, pot_.end());
    cp.converged = true;
    return cp;
  }

 private:
  struct BasicArc {
    int i, j;
    double flow;
  };

  void init_northwest() {
    Vec ra = a_, rb = b_;
    basis_.clear();
    basis_.reserve(num_nodes_ - 1);
    int i = 0, j = 0;
    while (true) {
      double t = std::min(ra[i], rb[j]);
      if (t < 0.0) t = 0.0;
      basis_.push_back({i, j, t});
      ra[i] -= t;
      rb[j] -= t;
      if (i == n_ - 1 && j == m_ - 1) break;
      if (j == m_ - 1) ++i;
      else if (i == n_ - 1) ++j;
      else if (ra[i] <= rb[j]) ++i;
      else ++j;
    }
  }

  void build_tree() {
    adj_.assign(num_nodes_, {});
    for (int k = 0; k < static_cast<int>(basis_.size()); ++k) {
      int u = basis_[k].i;
      int v = n_ + basis_[k].j;
      adj_[u].push_back({v, k});
      adj_[v].push_back({u, k});
    }
    parent_.assign(num_nodes_, -1);
    parent_arc_.assign(num_nodes_, -1);
    depth_.assign(num_nodes_, 0);
    pot_.assign(num_nodes_, 0.0);
    std::vector<int> stack{0};
    std::vector<char> seen(num_nodes_, 0);
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (auto [v, k] : adj_[u]) {
        if (seen[v]) continue;
        seen[v] = 1;
        ++visited;
        parent_[v] = u;
        parent_arc_[v] = k;
        depth_[v] = depth_[u] + 1;
        pot_[v] = cost_[static_cast<size_t>(basis_[k].i) * m_ + basis_[k].j] - pot_[u];
        stack.push_back(v);
      }
    }
    if (visited != num_nodes_) throw SolverError("transport simplex: basis is not a spanning tree");
  }

  bool find_entering(double tol, bool bland, int& ei, int& ej) const {
    double best = -tol;
    for (int i = 0; i < n_; ++i) {
      const double ui = pot_[i];
      const size_t row = static_cast<size_t>(i) * m_;
      for (int j = 0; j < m_; ++j) {
        double red = cost_[row + j] - ui - pot_[n_ + j];
        if (red < best) {
          best = red;
          ei = i;
          ej = j;
          if (bland) return true;  // first violating arc in row-major order
        }
      }
      if (bland && ei >= 0) return true;
    }
    return ei >= 0 && best < -tol;
  }

  // Pushes flow around the unique tree cycle closed by arc (ei, ej); returns
  // the amount moved (zero for a degenerate pivot).
  double apply_pivot(int ei, int ej) {
    int x = ei;
    int y = n_ + ej;
    // Collect tree paths up to the least common ancestor.
    std::vector<int> path_x, path_y;  // arc ids, walking upward
    {
      int u = x, v = y;
      while (depth_[u] > depth_[v]) {
        path_x.push_back(parent_arc_[u]);
        u = parent_[u];
      }
      while (depth_[v] > depth_[u]) {
        path_y.push_back(parent_arc_[v]);
        v = parent_[v];
      }
      while (u != v) {
        path_x.push_back(parent_arc_[u]);
        u = parent_[u];
        path_y.push_back(parent_arc_[v]);
        v = parent_[v];
      }
    }
    // Walk order: entering arc, then y's path upward, then x's path downward.
    // Signs alternate strictly (bipartite cycle), entering is +.
    cycle_arcs_.clear();
    cycle_signs_.clear();
    int sign = -1;
    for (int k : path_y) {
      cycle_arcs_.push_back(k);
      cycle_signs_.push_back(sign);
      sign = -sign;
    }
    for (size_t t = path_x.size(); t-- > 0;) {
      cycle_arcs_.push_back(path_x[t]);
      cycle_signs_.push_back(sign);
      sign = -sign;
    }
    if (sign != 1)
      throw SolverError("transport simplex: cycle parity broken");

    double theta = std::numeric_limits<double>::infinity();
    int leave_pos = -1;
    for (size_t t = 0; t < cycle_arcs_.size(); ++t) {
      if (cycle_signs_[t] != -1) continue;
      const BasicArc& arc = basis_[cycle_arcs_[t]];
      double f = std::max(arc.flow, 0.0);
      if (leave_pos < 0 || f < theta ||
          (f == theta && arc_less(cycle_arcs_[t], cycle_arcs_[leave_pos]))) {
        theta = f;
        leave_pos = static_cast<int>(t);
      }
    }
    if (leave_pos < 0) throw SolverError("transport simplex: unbounded pivot");
    for (size_t t = 0; t < cycle_arcs_.size(); ++t)
      basis_[cycle_arcs_[t]].flow += cycle_signs_[t] * theta;
    basis_[cycle_arcs_[leave_pos]] = {ei, ej, theta};
    return theta;
  }

  bool arc_less(int ka, int kb) const {
    const BasicArc& a = basis_[ka];
    const BasicArc& b = basis_[kb];
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  }

  int n_, m_, num_nodes_;
  const Vec& a_;
  const Vec& b_;
  const std::vector<double>& cost_;
  std::vector<BasicArc> basis_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  std::vector<int> parent_, parent_arc_, depth_;
  std::vector<double> pot_;
  std::vector<int> cycle_arcs_;
  std::vector<int> cycle_signs_;
};

void validate_exact(const Coupling& cp, const CostMatrix& cost) {
  const double tol = 1e-9;
  for (int i = 0; i < cp.n; ++i) {
    double s = 0.0;
    for (int j = 0; j < cp.m; ++j) s += cp.at(i, j);
    if (std::fabs(s - cp.row_marginal[i]) > tol)
      throw SolverError("exact coupling: row marginal off by more than 1e-9");
  }
  for (int j = 0; j < cp.m; ++j) {
    double s = 0.0;
    for (int i = 0; i < cp.n; ++i) s += cp.at(i, j);
    if (std::fabs(s - cp.col_marginal[j]) > tol)
      throw SolverError("exact coupling: column marginal off by more than 1e-9");
  }
  double dual_obj = 0.0;
  for (int i = 0; i < cp.n; ++i) dual_obj += cp.dual_row[i] * cp.row_marginal[i];
  for (int j = 0; j < cp.m; ++j) dual_obj += cp.dual_col[j] * cp.col_marginal[j];
  if (std::fabs(cp.objective - dual_obj) > tol)
    throw SolverError("exact coupling: duality gap above 1e-9");
  for (int i = 0; i < cp.n; ++i)
    for (int j = 0; j < cp.m; ++j)
      if (cp.dual_row[i] + cp.dual_col[j] > cost.at(i, j) + tol)
        throw SolverError("exact coupling: dual infeasible");
}

}  // namespace

Coupling solve_exact(const Vec& a, const Vec& b, const CostMatrix& cost) {
  if (static_cast<int>(a.size()) != cost.n || static_cast<int>(b.size()) != cost.m)
    throw DimensionMismatch("solve_exact: marginal sizes disagree with cost");
  for (double c : cost.entries)
    if (!std::isfinite(c)) throw ConfigError("solve_exact: non-finite cost entry");
  TransportSimplex solver(a, b, cost.entries, cost.n, cost.m);
  solver.run();
  Coupling cp = solver.extract();
  validate_exact(cp, cost);
  return cp;
}

Coupling solve(const Vec& a, const Vec& b, const CostMatrix& cost, const OtMethod& method) {
  if (method.kind == OtMethod::Kind::Exact) return solve_exact(a, b, cost);
  return solve_sinkhorn(a, b, cost, method.epsilon, method.tol, method.max_iter);
}

double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& cost,
                   double alpha, const OtMethod& method) {
  if (alpha < 1.0) throw ConfigError("wasserstein: order must be at least 1");
  Coupling cp = solve(mu.weights(), nu.weights(), cost.powered(alpha), method);
  return std::pow(cp.objective, 1.0 / alpha);
}

double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostFn& c,
                   double alpha, const OtMethod& method) {
  return wasserstein(mu, nu, CostMatrix::from_points(mu.points(), nu.points(), c), alpha, method);
}

double joint_wasserstein_decomposable(const EmpiricalJoint& a, const EmpiricalJoint& b,
                                      const LossSpec& loss, double alpha,
                                      const OtMethod& method) {
  if (a.num_classes() != b.num_classes())
    throw DimensionMismatch("joint distance: class counts disagree");
  const int M = a.num_classes();
  CostMatrix c1 = CostMatrix::from_points(
      a.inputs(), b.inputs(), [&](const Vec& x, const Vec& y) { return loss(x, y); });
  std::vector<Vec> ya, yb;
  ya.reserve(a.size());
  yb.reserve(b.size());
  for (int y : a.labels()) ya.push_back(one_hot(y, M));
  for (int y : b.labels()) yb.push_back(one_hot(y, M));
  CostMatrix c2 = CostMatrix::from_points(ya, yb,
                                          [&](const Vec& x, const Vec& y) { return loss(x, y); });
  CostMatrix joint = CostMatrix::decomposable(c1, c2);
  if (alpha < 1.0) throw ConfigError("joint distance: order must be at least 1");
  Coupling cp = solve(a.weights(), b.weights(), joint.powered(alpha), method);
  return std::pow(cp.objective, 1.0 / alpha);
}

SandwichTerms sandwich_terms(const EmpiricalJoint& p, const EmpiricalJoint& q, const CostFn& c1,
                             const CostFn& c2, double alpha) {
  if (alpha < 1.0) throw ConfigError("sandwich_terms: order must be at least 1");
  if (p.num_classes() != q.num_classes())
    throw DimensionMismatch("sandwich_terms: class counts disagree");
  const int M = p.num_classes();

  std::vector<Vec> yp, yq;
  yp.reserve(p.size());
  yq.reserve(q.size());
  for (int y : p.labels()) yp.push_back(one_hot(y, M));
  for (int y : q.labels()) yq.push_back(one_hot(y, M));

  CostMatrix cx = CostMatrix::from_points(p.inputs(), q.inputs(), c1);
  CostMatrix cy = CostMatrix::from_points(yp, yq, c2);

  SandwichTerms out;

  // Joint distance under the split cost.
  {
    Coupling cp = solve_exact(p.weights(), q.weights(),
                              CostMatrix::decomposable(cx, cy).powered(alpha));
    out.joint = std::pow(cp.objective, 1.0 / alpha);
  }

  // x side: marginal transport plus per-atom conditional costs under the
  // optimal x plan. Conditionals given support points are point masses, so
  // the coupled conditional term needs no inner solve.
  {
    Coupling gx = solve_exact(p.weights(), q.weights(), cx.powered(alpha));
    out.lower_x = std::pow(gx.objective, 1.0 / alpha);
    double inner = 0.0;
    for (int i = 0; i < gx.n; ++i)
      for (int j = 0; j < gx.m; ++j) {
        double g = gx.at(i, j);
        if (g > 0.0) inner += g * std::pow(cy.at(i, j), alpha);
      }
    out.upper_x = out.lower_x + std::pow(inner, 1.0 / alpha);
  }

  // y side: label-marginal transport; conditional term couples true class
  // conditionals under the optimal label plan.
  {
    Vec pm = class_masses(p);
    Vec qm = class_masses(q);
    std::vector<Vec> verts;
    verts.reserve(M);
    for (int c = 0; c < M; ++c) verts.push_back(one_hot(c, M));
    CostMatrix cyy = CostMatrix::from_points(verts, verts, c2);
    Coupling gy = solve_exact(pm, qm, cyy.powered(alpha));
    out.lower_y = std::pow(gy.objective, 1.0 / alpha);
    double inner = 0.0;
    for (int u = 0; u < M; ++u)
      for (int v = 0; v < M; ++v) {
        double g = gy.at(u, v);
        if (g <= 0.0) continue;
        DiscreteMeasure pu = conditional(p, u);
        DiscreteMeasure qv = conditional(q, v);
        CostMatrix inner_cost = CostMatrix::from_points(pu.points(), qv.points(), c1);
        Coupling gc = solve_exact(pu.weights(), qv.weights(), inner_cost.powered(alpha));
        inner += g * gc.objective;  // already the alpha-power of the distance
      }
    out.upper_y = out.lower_y + std::pow(inner, 1.0 / alpha);
  }

  const double tol = 1e-7;
  if (out.lower_x > out.joint + tol)
    throw SandwichViolated("sandwich: x lower bound above joint", out.joint - out.lower_x);
  if (out.lower_y > out.joint + tol)
    throw SandwichViolated("sandwich: y lower bound above joint", out.joint - out.lower_y);
  if (out.joint > out.upper_x + tol)
    throw SandwichViolated("sandwich: joint above x upper bound", out.upper_x - out.joint);
  if (out.joint > out.upper_y + tol)
    throw SandwichViolated("sandwich: joint above y upper bound", out.upper_y - out.joint);
  return out;
}

}  // namespace entot
