#include "entot/entangle.hpp"

#include <cmath>
#include <map>

namespace entot {

namespace {

// Support of a pushforward marginal with per-point label conditionals.
// Bit-identical outputs merge; their label conditionals mix by weight.
struct GroupedOutputs {
  std::vector<Vec> outputs;
  Vec weights;
  std::vector<Vec> label_cond;  // rows sum to 1, length num_classes
};

GroupedOutputs group_outputs(const EmpiricalJoint& pushed) {
  GroupedOutputs g;
  std::map<Vec, int> index;
  const int M = pushed.num_classes();
  for (int i = 0; i < pushed.size(); ++i) {
    if (pushed.weights()[i] <= 0.0) continue;
    auto [it, fresh] = index.try_emplace(pushed.inputs()[i], static_cast<int>(g.outputs.size()));
    if (fresh) {
      g.outputs.push_back(pushed.inputs()[i]);
      g.weights.push_back(0.0);
      g.label_cond.emplace_back(M, 0.0);
    }
    g.weights[it->second] += pushed.weights()[i];
    g.label_cond[it->second][pushed.labels()[i]] += pushed.weights()[i];
  }
  for (size_t k = 0; k < g.outputs.size(); ++k)
    for (double& v : g.label_cond[k]) v /= g.weights[k];
  return g;
}

// Distance between two per-group label conditionals; point masses collapse
// to a single loss evaluation, mixtures get an exact class-level solve.
double conditional_label_w1(const Vec& ca, const Vec& cb, const CostMatrix& class_cost) {
  const int M = class_cost.n;
  int ia = -1, ib = -1, na = 0, nb = 0;
  for (int c = 0; c < M; ++c) {
    if (ca[c] > 0.0) {
      ++na;
      if (ia < 0) ia = c;
    }
    if (cb[c] > 0.0) {
      ++nb;
      if (ib < 0) ib = c;
    }
  }
  if (na == 1 && nb == 1) return class_cost.at(ia, ib);
  return solve_exact(ca, cb, class_cost).objective;
}

CostMatrix class_cost_matrix(int M, const LossSpec& loss) {
  std::vector<Vec> verts;
  verts.reserve(M);
  for (int c = 0; c < M; ++c) verts.push_back(one_hot(c, M));
  return CostMatrix::from_points(verts, verts,
                                 [&](const Vec& a, const Vec& b) { return loss(a, b); });
}

struct OutputCouplingTerms {
  double w1 = 0.0;
  double entanglement = 0.0;
  bool approximate = false;
};

// One solve yields both the pushforward marginal distance and the coupled
// label discrepancy; using the same plan for both keeps the certified chain
// exact.
OutputCouplingTerms output_coupling_terms(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                          const ModelFn& f, const LossSpec& loss,
                                          const OtMethod& method) {
  GroupedOutputs gp = group_outputs(pushforward(p, f));
  GroupedOutputs gq = group_outputs(pushforward(q, f));
  CostMatrix cost = CostMatrix::from_points(
      gp.outputs, gq.outputs, [&](const Vec& a, const Vec& b) { return loss(a, b); });
  Coupling plan = solve(gp.weights, gq.weights, cost, method);
  CostMatrix class_cost = class_cost_matrix(p.num_classes(), loss);
  OutputCouplingTerms out;
  out.w1 = plan.objective;
  out.approximate = method.kind == OtMethod::Kind::Sinkhorn;
  for (int i = 0; i < plan.n; ++i)
    for (int j = 0; j < plan.m; ++j) {
      double g = plan.at(i, j);
      if (g > 0.0)
        out.entanglement += g * conditional_label_w1(gp.label_cond[i], gq.label_cond[j], class_cost);
    }
  return out;
}

struct LabelCouplingTerms {
  double w1 = 0.0;
  double entanglement = 0.0;
};

LabelCouplingTerms label_coupling_terms(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                        const ModelFn& f, const LossSpec& loss,
                                        const OtMethod& method) {
  const int M = p.num_classes();
  Vec pm = class_masses(p);
  Vec qm = class_masses(q);
  CostMatrix class_cost = class_cost_matrix(M, loss);
  Coupling plan = solve_exact(pm, qm, class_cost);

  EmpiricalJoint fp = pushforward(p, f);
  EmpiricalJoint fq = pushforward(q, f);
  LabelCouplingTerms out;
  out.w1 = plan.objective;
  for (int u = 0; u < M; ++u)
    for (int v = 0; v < M; ++v) {
      double g = plan.at(u, v);
      if (g <= 0.0) continue;  // empty classes never receive plan mass
      DiscreteMeasure pu = conditional(fp, u);
      DiscreteMeasure qv = conditional(fq, v);
      CostMatrix cost = CostMatrix::from_points(
          pu.points(), qv.points(), [&](const Vec& a, const Vec& b) { return loss(a, b); });
      Coupling inner = solve(pu.weights(), qv.weights(), cost, method);
      out.entanglement += g * inner.objective;
    }
  return out;
}

}  // namespace

double risk(const EmpiricalJoint& joint, const ModelFn& f, const LossSpec& loss) {
  const int M = joint.num_classes();
  double r = 0.0;
  for (int i = 0; i < joint.size(); ++i) {
    if (joint.weights()[i] <= 0.0) continue;
    r += joint.weights()[i] * loss(f(joint.inputs()[i]), one_hot(joint.labels()[i], M));
  }
  return r;
}

double label_entanglement(const EmpiricalJoint& p, const EmpiricalJoint& q, const ModelFn& f,
                          const LossSpec& loss, const OtMethod& method) {
  return output_coupling_terms(p, q, f, loss, method).entanglement;
}

double prediction_entanglement(const EmpiricalJoint& p, const EmpiricalJoint& q, const ModelFn& f,
                               const LossSpec& loss, const OtMethod& method) {
  return label_coupling_terms(p, q, f, loss, method).entanglement;
}

double marginal_output_w1(const EmpiricalJoint& p, const EmpiricalJoint& q, const ModelFn& f,
                          const LossSpec& loss, const OtMethod& method) {
  return output_coupling_terms(p, q, f, loss, method).w1;
}

double label_shift_w1(const EmpiricalJoint& p, const EmpiricalJoint& q, const LossSpec& loss) {
  if (p.num_classes() != q.num_classes())
    throw DimensionMismatch("label_shift_w1: class counts disagree");
  CostMatrix class_cost = class_cost_matrix(p.num_classes(), loss);
  return solve_exact(class_masses(p), class_masses(q), class_cost).objective;
}

EntanglementReport oracle_upper_bound(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                      const ModelFn& f, const LossSpec& loss,
                                      const OtMethod& method) {
  if (p.num_classes() != q.num_classes())
    throw DimensionMismatch("oracle_upper_bound: class counts disagree");
  EntanglementReport r;
  OutputCouplingTerms oc = output_coupling_terms(p, q, f, loss, method);
  LabelCouplingTerms lc = label_coupling_terms(p, q, f, loss, method);
  r.label_entanglement = oc.entanglement;
  r.prediction_entanglement = lc.entanglement;
  r.marginal_output_w1 = oc.w1;
  r.label_shift_w1 = lc.w1;
  r.source_risk = risk(p, f, loss);
  r.target_risk = risk(q, f, loss);
  r.oub = r.source_risk + r.marginal_output_w1 + r.label_entanglement;
  r.wrr = r.source_risk + r.marginal_output_w1;
  r.approximate = oc.approximate;
  if (loss.is_metric() && method.kind == OtMethod::Kind::Exact) {
    double slack = r.oub - r.target_risk;
    if (slack < -1e-7)
      throw BoundViolated("oracle upper bound fell below target risk", slack);
  }
  return r;
}

}  // namespace entot
