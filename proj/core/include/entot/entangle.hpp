#pragma once

#include "entot/loss.hpp"
#include "entot/measures.hpp"
#include "entot/ot.hpp"

namespace entot {

// Diagnostic bundle for one (source, target, model) triple. oub and wrr are
// exact sums of the stored fields:
//   oub = source_risk + marginal_output_w1 + label_entanglement
//   wrr = source_risk + marginal_output_w1
// approximate marks reports whose transport terms came from Sinkhorn rather
// than the exact solver.
struct EntanglementReport {
  double label_entanglement = 0.0;       // coupled label discrepancy over an optimal output plan
  double prediction_entanglement = 0.0;  // coupled output discrepancy over an optimal label plan
  double marginal_output_w1 = 0.0;       // order-1 distance between pushforward input marginals
  double label_shift_w1 = 0.0;           // order-1 distance between label marginals
  double source_risk = 0.0;
  double target_risk = 0.0;
  double oub = 0.0;
  double wrr = 0.0;
  bool approximate = false;
};

// Mean loss of predictions against one-hot labels.
double risk(const EmpiricalJoint& joint, const ModelFn& f, const LossSpec& loss);

// Couples the two pushforward input marginals optimally, then averages the
// distance between the label conditionals attached to coupled outputs.
// Atoms with bit-identical outputs are aggregated into one support point
// carrying the mixed label conditional, so ties are handled exactly; with
// distinct outputs the inner term collapses to the loss between the two
// sample labels. `method` drives the output-marginal solve; the small inner
// label solves are always exact.
double label_entanglement(const EmpiricalJoint& p, const EmpiricalJoint& q, const ModelFn& f,
                          const LossSpec& loss, const OtMethod& method = OtMethod::exact());

// Couples the label marginals optimally (one-hot support, zero-mass classes
// receive no plan mass), then averages the order-1 distance between the
// pushforward class conditionals of coupled label pairs.
double prediction_entanglement(const EmpiricalJoint& p, const EmpiricalJoint& q, const ModelFn& f,
                               const LossSpec& loss, const OtMethod& method = OtMethod::exact());

double marginal_output_w1(const EmpiricalJoint& p, const EmpiricalJoint& q, const ModelFn& f,
                          const LossSpec& loss, const OtMethod& method = OtMethod::exact());

double label_shift_w1(const EmpiricalJoint& p, const EmpiricalJoint& q, const LossSpec& loss);

// Full report. When the loss is a metric and the solver exact, the target
// risk is asserted against the certified chain
//   target_risk <= source_risk + marginal_output_w1 + label_entanglement + 1e-7
// and BoundViolated is thrown on failure (that would be an implementation
// bug, not a property of the data).
EntanglementReport oracle_upper_bound(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                      const ModelFn& f, const LossSpec& loss,
                                      const OtMethod& method = OtMethod::exact());

}  // namespace entot
