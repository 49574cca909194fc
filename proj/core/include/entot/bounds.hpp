#pragma once

#include <string>
#include <vector>

#include "entot/entangle.hpp"
#include "entot/gaussian.hpp"
#include "entot/loss.hpp"
#include "entot/measures.hpp"
#include "entot/scenarios.hpp"

namespace entot {

enum class BoundId {
  RiskChainRaw,           // target risk against source risk + raw-pair transport
  RiskChainPushforward,   // raw-pair transport against pushforward transport
  RiskViaLabelEntanglement,    // target risk vs risk + output marginal + label entanglement
  RiskViaPredictionEntanglement,  // target risk vs risk + label shift + prediction entanglement
  ConvertLabelToPrediction,    // label entanglement capped by prediction-side quantities
  ConvertPredictionToLabel,    // prediction entanglement capped by label-side quantities
  ObjectiveEquivalenceLower,   // oracle bound capped by 3x the label-side objective
  ObjectiveEquivalenceUpper,   // label-side objective capped by 3x the oracle bound
  LabelShiftLower,             // label-marginal distance capped by the oracle bound
  CcToLje,                     // joint-risk level implied by a measured conditional-closeness level
  NotCc,                       // unavoidable-risk inequality at a conditional-closeness level
  CcOubTightness,              // oracle bound capped by 3x the conditional-closeness budget
  GsImpliesCc,                 // measured conditional-closeness level under a gradual chain
  GsEntanglementCap,           // label entanglement capped under a gradual chain
  KappaVariantOutput,          // relaxed-triangle variant, output-marginal form
  KappaVariantLabel,           // relaxed-triangle variant, label-marginal form
  KlOutput,                    // divergence form of the output-marginal bound
  KlLabel,                     // divergence form of the label-marginal bound
  GaussianScaledDecomposition  // closed-form joint distance vs marginal + conditional split
};

const char* to_string(BoundId id);

// One certified inequality lhs <= rhs. slack = rhs - lhs; passed means
// slack >= -tolerance. Reports whose preconditions failed come back with
// applicable == false and the reason in context (they are never counted as
// silent passes). A two-sided (tightness) report additionally requires
// slack <= tightness documented in context.
struct BoundReport {
  BoundId id = BoundId::RiskChainRaw;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool passed = false;
  bool applicable = true;
  std::string context;
};

// Scale constants for hypothesis budgets. Loss constants (upper bound,
// minimum label separation, triangle factor) always come from the LossSpec;
// everything below parameterizes scenario assumptions. Conditional-closeness
// and label-shift levels are always re-measured from the data, never trusted
// from here.
struct AssumptionParams {
  double lambda = 0.0;   // joint-risk level
  double kappa = 0.0;    // conditional-closeness level
  double delta = 0.0;    // label-shift level
  double a = 1.0;        // gradual mixture cap
  double b = 0.1;        // source-risk budget under a gradual chain
  double epsilon = 0.05;  // gradual per-link budget
  int s = 1;             // gradual stage count
  double varkappa = 1.0;  // relaxed triangle factor

  void validate() const;  // throws ConfigError
};

// Every check recomputes its measured quantities from (p, q, f) with exact
// transport. Default tolerance 1e-7 on each certified inequality.

// Chain: R_q <= R_p + W(raw pairs) and W(raw pairs) vs W(pushforward pairs);
// the second is asserted tight when f is injective on the support.
std::vector<BoundReport> check_lemma1_chain(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                            const ModelFn& f, const LossSpec& loss,
                                            double tol = 1e-7);

// Target-risk caps through both entanglement estimators.
std::vector<BoundReport> check_corollary_bounds(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                                const ModelFn& f, const LossSpec& loss,
                                                double tol = 1e-7);

// Mutual caps between the two entanglement estimators.
std::vector<BoundReport> check_conversions(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                           const ModelFn& f, const LossSpec& loss,
                                           double tol = 1e-7);

// The label-side objective and the oracle bound stay within a factor 3.
std::vector<BoundReport> check_objective_equivalence(const EmpiricalJoint& p,
                                                     const EmpiricalJoint& q, const ModelFn& f,
                                                     const LossSpec& loss, double tol = 1e-7);

// Label-marginal distance never exceeds the oracle bound.
BoundReport check_label_shift_lower(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                    const ModelFn& f, const LossSpec& loss, double tol = 1e-7);

// With kappa_hat = R_p(f) + max_y W(f#p_{x|y}, f#q_{x|y}) and delta_hat the
// measured label shift: R_p + R_q <= 2 kappa_hat + ((L + l)/l) delta_hat.
BoundReport check_cc_to_lje(const EmpiricalJoint& p, const EmpiricalJoint& q, const ModelFn& f,
                            const LossSpec& loss, double tol = 1e-7);

// At any level kappa <= kappa_hat(f):
//   kappa q_y(min) <= R_p(f) q_y(max) + R_q(f) + R_r(f)
// where r reweights source conditionals by target label masses. Applied per
// hypothesis (kappa_hat is measured for this f, not over a class).
BoundReport check_not_cc(const EmpiricalJoint& p, const EmpiricalJoint& q, const ModelFn& f,
                         const LossSpec& loss, double kappa, double tol = 1e-7);

// U(f) <= 3 (kappa_hat + ((L + l)/l) delta_hat).
BoundReport check_cc_oub_tightness(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                   const ModelFn& f, const LossSpec& loss, double tol = 1e-7);

// Gradual chain: verifies every output-space link of f against
// params.epsilon (ChainViolation on breach), requires R_p(f) < params.b,
// then certifies kappa_hat(f) <= b + epsilon (a/2) s (s+1). Assumes the
// target conditionals are stage mixtures capped at params.a, as produced by
// the gradual scenario generator.
BoundReport check_gs_implies_cc(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                const std::vector<EmpiricalJoint>& chain, const ModelFn& f,
                                const LossSpec& loss, const AssumptionParams& params,
                                double tol = 1e-7);

// Label entanglement cap under the same preconditions (reported
// not-applicable rather than thrown when the chain or risk budget fails):
//   E_y(f) <= 2b + epsilon a s (s+1) + 2 delta_hat (L + l)/l.
BoundReport check_gs_entanglement_cap(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                      const std::vector<EmpiricalJoint>& chain, const ModelFn& f,
                                      const LossSpec& loss, const AssumptionParams& params,
                                      double tol = 1e-7);

// Relaxed-triangle variants with factor loss.triangle_factor:
//   R_q <= k^2 R_p + k W(outputs) + k^2 E_y
//   R_q <= k^2 R_p + k^2 W(labels) + k E_yhat
std::vector<BoundReport> check_kappa_variants(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                              const ModelFn& f, const LossSpec& loss,
                                              double tol = 1e-7);

// Divergence forms: the transport term is replaced by
// L sqrt(min(KL(u||v), KL(v||u)) / 2). Output marginals are discretized over
// shared histogram bins (bins_per_axis over [0,1] per coordinate; this
// discretization layer is an approximation), label marginals are already
// discrete. Infinite divergence makes the bound vacuous and it passes with
// infinite slack.
std::vector<BoundReport> check_kl_corollary(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                            const ModelFn& f, const LossSpec& loss,
                                            int bins_per_axis = 8, double tol = 1e-7);

// The scaled-covariance identity as a report row: lhs is the absolute gap
// between the two independently computed sides, rhs the Monte-Carlo-aware
// tolerance.
BoundReport gaussian_decomposition_report(const DecompositionCheck& check);

// Every check in one sweep. Gradual-chain checks run only when a chain is
// present and report not-applicable (rather than throwing) when their
// preconditions fail, so the sweep always yields a complete table.
// params.kappa sets the level probed by the unavoidable-risk check.
std::vector<BoundReport> run_bound_suite(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                         const std::vector<EmpiricalJoint>& chain,
                                         const ModelFn& f, const LossSpec& loss,
                                         const AssumptionParams& params, double tol = 1e-7,
                                         int bins_per_axis = 8);

std::string bound_reports_csv(const std::vector<BoundReport>& reports);

}  // namespace entot
