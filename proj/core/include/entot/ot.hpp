#pragma once

#include <functional>
#include <vector>

#include "entot/loss.hpp"
#include "entot/measures.hpp"

namespace entot {

using CostFn = std::function<double(const Vec&, const Vec&)>;

enum class CostKind { Plain, Decomposable };

// Dense pairwise cost. A decomposable matrix keeps both parts and satisfies
// entries[k] == part1[k] + part2[k] exactly (entries are formed from the
// parts, never recomputed another way).
struct CostMatrix {
  int n = 0;
  int m = 0;
  CostKind kind = CostKind::Plain;
  std::vector<double> entries;
  std::vector<double> part1;  // Decomposable only
  std::vector<double> part2;  // Decomposable only

  double at(int i, int j) const { return entries[static_cast<size_t>(i) * m + j]; }

  static CostMatrix from_points(const std::vector<Vec>& a, const std::vector<Vec>& b,
                                const CostFn& c);
  static CostMatrix decomposable(const CostMatrix& c1, const CostMatrix& c2);
  // Entrywise power; used to realize order-alpha transport on a base cost.
  CostMatrix powered(double alpha) const;
};

// Transport plan plus certificate material. For exact solves dual_row and
// dual_col hold optimal potentials: feasibility (u_i + v_j <= c_ij + 1e-9 on
// every arc) and a duality gap below 1e-9 certify optimality. Sinkhorn
// couplings carry no duals and report convergence through the flag; their
// objective is the unregularized <plan, cost>.
struct Coupling {
  int n = 0;
  int m = 0;
  std::vector<double> plan;  // row-major n*m
  Vec row_marginal;
  Vec col_marginal;
  double objective = 0.0;
  Vec dual_row;
  Vec dual_col;
  bool converged = true;

  double at(int i, int j) const { return plan[static_cast<size_t>(i) * m + j]; }
};

struct OtMethod {
  enum class Kind { Exact, Sinkhorn };
  Kind kind = Kind::Exact;
  double epsilon = 0.05;
  double tol = 1e-9;
  int max_iter = 200000;

  static OtMethod exact() { return OtMethod{}; }
  static OtMethod sinkhorn(double eps = 0.05) {
    OtMethod m;
    m.kind = Kind::Sinkhorn;
    m.epsilon = eps;
    return m;
  }
};

// Network simplex on the bipartite transport graph. Throws DimensionMismatch
// when marginal sizes disagree with the cost, SolverError if the certificate
// cannot be produced (internal bug; normalized inputs are always feasible).
Coupling solve_exact(const Vec& a, const Vec& b, const CostMatrix& cost);

// Log-domain Sinkhorn with epsilon-scaling warm starts. Never throws on
// iteration exhaustion: the plan comes back with converged == false.
Coupling solve_sinkhorn(const Vec& a, const Vec& b, const CostMatrix& cost,
                        double epsilon = 0.05, double tol = 1e-9, int max_iter = 200000);

Coupling solve(const Vec& a, const Vec& b, const CostMatrix& cost, const OtMethod& method);

// Order-alpha transport distance: cost entries are raised to alpha before
// solving and the optimal objective is taken to the 1/alpha power. Plans for
// different alpha genuinely differ; nothing is shared between orders.
double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& cost,
                   double alpha = 1.0, const OtMethod& method = OtMethod::exact());
double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostFn& c,
                   double alpha = 1.0, const OtMethod& method = OtMethod::exact());

// Distance between labeled joints under the split cost
// loss(pred, pred') + loss(onehot y, onehot y').
double joint_wasserstein_decomposable(const EmpiricalJoint& a, const EmpiricalJoint& b,
                                      const LossSpec& loss, double alpha = 1.0,
                                      const OtMethod& method = OtMethod::exact());

// Two-sided certificate for a split-cost joint distance: marginal transport
// lower-bounds it, marginal plus coupled conditional transport upper-bounds
// it, in both coordinates.
struct SandwichTerms {
  double lower_x = 0.0;
  double lower_y = 0.0;
  double joint = 0.0;
  double upper_x = 0.0;
  double upper_y = 0.0;
};

// c1 acts on the stored vectors (inputs or predictions), c2 on one-hot
// labels. The x-side upper bound couples the per-atom conditionals given
// support points; the y-side one couples true class conditionals under the
// optimal label plan. Throws SandwichViolated if any ordering fails by more
// than 1e-7.
SandwichTerms sandwich_terms(const EmpiricalJoint& p, const EmpiricalJoint& q, const CostFn& c1,
                             const CostFn& c2, double alpha = 1.0);

}  // namespace entot
