#include <algorithm>
#include <cmath>
#include <limits>

#include "entot/ot.hpp"

namespace entot {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// max + log-sum-exp over a strided slice; tolerates -inf entries.
double logsumexp(const std::vector<double>& v) {
  double hi = kNegInf;
  for (double x : v) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

}  // namespace

Coupling solve_sinkhorn(const Vec& a, const Vec& b, const CostMatrix& cost, double epsilon,
                        double tol, int max_iter) {
  if (static_cast<int>(a.size()) != cost.n || static_cast<int>(b.size()) != cost.m)
    throw DimensionMismatch("solve_sinkhorn: marginal sizes disagree with cost");
  if (epsilon <= 0.0) throw ConfigError("solve_sinkhorn: epsilon must be positive");
  const int n = cost.n, m = cost.m;

  Vec log_a(n), log_b(m);
  for (int i = 0; i < n; ++i) log_a[i] = a[i] > 0.0 ? std::log(a[i]) : kNegInf;
  for (int j = 0; j < m; ++j) log_b[j] = b[j] > 0.0 ? std::log(b[j]) : kNegInf;

  // Potentials for P_ij = exp((f_i + g_j - C_ij) / eps + log_a_i + log_b_j).
  Vec f(n, 0.0), g(m, 0.0);
  std::vector<double> scratch(std::max(n, m));

  double max_c = 0.0;
  for (double c : cost.entries) max_c = std::max(max_c, std::fabs(c));
  // Epsilon scaling: halve from the cost scale down to the target, warm
  // starting each stage from the previous potentials.
  std::vector<double> stages;
  for (double e = std::max(max_c, epsilon); e > epsilon * 1.5; e *= 0.5) stages.push_back(e);
  stages.push_back(epsilon);

  int iters_left = max_iter;
  bool converged = false;
  for (size_t s = 0; s < stages.size(); ++s) {
    const double eps = stages[s];
    const bool final_stage = s + 1 == stages.size();
    const double stage_tol = final_stage ? tol : std::max(tol, 1e-3);
    while (iters_left > 0) {
      --iters_left;
      for (int i = 0; i < n; ++i) {
        if (log_a[i] == kNegInf) {
          f[i] = kNegInf;
          continue;
        }
        scratch.resize(m);
        for (int j = 0; j < m; ++j)
          scratch[j] = log_b[j] == kNegInf
                           ? kNegInf
                           : (g[j] - cost.at(i, j)) / eps + log_b[j];
        f[i] = -eps * logsumexp(scratch);
      }
      for (int j = 0; j < m; ++j) {
        if (log_b[j] == kNegInf) {
          g[j] = kNegInf;
          continue;
        }
        scratch.resize(n);
        for (int i = 0; i < n; ++i)
          scratch[i] = log_a[i] == kNegInf
                           ? kNegInf
                           : (f[i] - cost.at(i, j)) / eps + log_a[i];
        g[j] = -eps * logsumexp(scratch);
      }
      // After the g update columns are satisfied exactly; measure rows.
      double err = 0.0;
      for (int i = 0; i < n; ++i) {
        if (log_a[i] == kNegInf) continue;
        double row = 0.0;
        for (int j = 0; j < m; ++j) {
          if (log_b[j] == kNegInf) continue;
          row += std::exp((f[i] + g[j] - cost.at(i, j)) / eps + log_a[i] + log_b[j]);
        }
        err = std::max(err, std::fabs(row - a[i]));
      }
      if (err < stage_tol) {
        if (final_stage) converged = true;
        break;
      }
    }
  }

  const double eps = epsilon;
  Coupling cp;
  cp.n = n;
  cp.m = m;
  cp.plan.assign(static_cast<size_t>(n) * m, 0.0);
  double obj = 0.0;
  for (int i = 0; i < n; ++i) {
    if (log_a[i] == kNegInf) continue;
    for (int j = 0; j < m; ++j) {
      if (log_b[j] == kNegInf) continue;
      double p = std::exp((f[i] + g[j] - cost.at(i, j)) / eps + log_a[i] + log_b[j]);
      cp.plan[static_cast<size_t>(i) * m + j] = p;
      obj += p * cost.at(i, j);
    }
  }
  cp.row_marginal = a;
  cp.col_marginal = b;
  cp.objective = obj;
  cp.converged = converged;
  return cp;
}

}  // namespace entot
