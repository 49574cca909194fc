#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entot/common.hpp"
#include "entot/measures.hpp"
#include "entot/ot.hpp"
#include "entot/rng.hpp"

namespace entot {

enum class ModelKind { LinearSoftmax, MlpOneHidden };
enum class Activation { Relu, Tanh };

// Softmax-headed classifier over a flat parameter vector. Parameter layout:
// linear-softmax: W (classes x input_dim, row-major) then bias (classes);
// mlp-1hidden: W1 (hidden x input_dim), b1 (hidden), W2 (classes x hidden),
// b2 (classes). Softmax keeps outputs on the simplex within 1e-9 at any
// parameter value, so every output is a valid label-space point.
class Model {
 public:
  Model(ModelKind kind, int input_dim, int num_classes, int hidden_units = 0,
        Activation activation = Activation::Relu);

  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer, deterministic
  // under the generator state.
  void init_params(Rng& rng);

  Vec logits(const Vec& x) const;
  Vec operator()(const Vec& x) const;
  // Post-activation hidden features; throws FeatureTermUnavailable for the
  // linear model (it has no intermediate representation).
  Vec hidden(const Vec& x) const;

  // Snapshot closure over the current parameters; later set_parameters calls
  // do not affect it.
  ModelFn fn() const;

  int parameter_count() const;
  const Vec& parameters() const { return params_; }
  void set_parameters(const Vec& p);

  ModelKind kind() const { return kind_; }
  int input_dim() const { return input_dim_; }
  int num_classes() const { return num_classes_; }
  int hidden_units() const { return hidden_; }
  Activation activation() const { return activation_; }

 private:
  ModelKind kind_;
  int input_dim_;
  int num_classes_;
  int hidden_;
  Activation activation_;
  Vec params_;
};

enum class Objective { Erm, Wrr, JdotLite, LjeOracle, CcOracle };
enum class TrainLoss { Euclidean, CrossEntropy };
enum class OptimizerKind { Sgd, Adam };

struct TrainConfig {
  Objective objective = Objective::Erm;
  TrainLoss loss = TrainLoss::Euclidean;
  ModelKind model = ModelKind::LinearSoftmax;
  int hidden_units = 16;
  Activation activation = Activation::Relu;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 64;
  int epochs = 10;
  OtMethod ot_method = OtMethod::exact();
  int wasserstein_order = 1;  // 1 or 2; ground cost on outputs is euclidean
  bool class_balanced_sampling = false;
  double feature_weight = 1e-3;  // jdot_lite hidden-feature multiplier
  double wrr_weight = 1.0;       // scaling of the output-marginal transport term
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// Objective value with its additive pieces; terms an objective does not use
// stay zero.
struct ObjectiveTerms {
  double value = 0.0;
  double risk_p = 0.0;
  double risk_q = 0.0;       // lje_oracle second risk
  double w_marginal = 0.0;   // output-marginal transport (wrr, jdot_lite)
  double w_feature = 0.0;    // hidden-feature transport (jdot_lite)
  double w_class_max = 0.0;  // largest per-class transport (cc_oracle)
  int active_class = -1;     // cc_oracle arg-max class, lowest index on ties
};

// erm: R_p. wrr: R_p + wrr_weight * W(outputs). jdot_lite: wrr +
// feature_weight * W(hidden features). lje_oracle: R_p + R_q (uses target
// labels). cc_oracle: R_p + max over classes of per-class output transport;
// throws MissingClass when a class is absent from either batch.
ObjectiveTerms objective_value(const Model& model, const EmpiricalJoint& batch_p,
                               const EmpiricalJoint& batch_q, const TrainConfig& config);

// Analytic gradient. Transport terms hold their optimal plan fixed, so this
// is the exact gradient of the plan-frozen surrogate; the cc_oracle max
// passes the subgradient through the active class only.
Vec gradient(const Model& model, const EmpiricalJoint& batch_p, const EmpiricalJoint& batch_q,
             const TrainConfig& config);

// The surrogate behind gradient(): transport plans (and the cc active class)
// are computed at `anchor` and held fixed while the terms are re-evaluated
// at `model`. gradient(anchor, ...) is the exact gradient of this function
// in `model` at anchor, which is what finite differences verify.
double plan_frozen_objective(const Model& model, const Model& anchor,
                             const EmpiricalJoint& batch_p, const EmpiricalJoint& batch_q,
                             const TrainConfig& config);

struct HistoryRow {
  int epoch = 0;
  double src_acc = 0.0;
  double tgt_acc = 0.0;
  double risk_p = 0.0;
  double risk_q = 0.0;
  double w_marginal = 0.0;
  double entangle_y = 0.0;
  double objective = 0.0;
};

struct FitResult {
  Model model;
  std::vector<HistoryRow> history;
};

// Weighted fraction of atoms whose arg-max output matches the label.
double accuracy(const EmpiricalJoint& joint, const Model& model);

// Thrown when the objective turns non-finite; carries the last finite state
// (parameters before the bad step, history up to that point).
struct DivergedWithState : Diverged {
  FitResult last_finite;
  DivergedWithState(const std::string& what, FitResult state)
      : Diverged(what), last_finite(std::move(state)) {}
};

// Minibatch training, deterministic per config.seed. History diagnostics
// (risks, output-marginal transport, label entanglement) are measured on the
// full datasets with the euclidean label metric after each epoch, whatever
// the training loss.
FitResult fit(const EmpiricalJoint& source, const EmpiricalJoint& target,
              const TrainConfig& config);

// Header: epoch,src_acc,tgt_acc,risk_p,risk_q,w_marginal,entangle_y,objective
std::string history_csv(const std::vector<HistoryRow>& rows);

}  // namespace entot
