#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>

#include "doctest.h"
#include "entot/scenarios.hpp"
#include "entot/train.hpp"

using namespace entot;

namespace {

EmpiricalJoint random_batch(Rng rng, int n, int d, int classes) {
  std::vector<Vec> xs(n, Vec(d));
  std::vector<int> ys(n);
  for (int i = 0; i < n; ++i) {
    for (double& v : xs[i]) v = rng.next_normal();
    ys[i] = i % classes;  // every class present
  }
  return EmpiricalJoint(std::move(xs), std::move(ys), Vec(n, 1.0 / n), classes);
}

Model make_model(const TrainConfig& cfg, int dim, int classes, uint64_t seed) {
  Model m(cfg.model, dim, classes, cfg.model == ModelKind::MlpOneHidden ? cfg.hidden_units : 0,
          cfg.activation);
  Rng rng(seed);
  m.init_params(rng);
  return m;
}

// Central finite differences of the plan-frozen surrogate anchored at the
// model's own parameters; the analytic gradient differentiates exactly that
// surrogate.
double max_abs_gradient_gap(const Model& model, const EmpiricalJoint& bp,
                            const EmpiricalJoint& bq, const TrainConfig& cfg, double h) {
  Vec analytic = gradient(model, bp, bq, cfg);
  Model probe = model;
  Vec params = model.parameters();
  double worst = 0.0;
  for (size_t k = 0; k < params.size(); ++k) {
    Vec bumped = params;
    bumped[k] = params[k] + h;
    probe.set_parameters(bumped);
    double up = plan_frozen_objective(probe, model, bp, bq, cfg);
    bumped[k] = params[k] - h;
    probe.set_parameters(bumped);
    double down = plan_frozen_objective(probe, model, bp, bq, cfg);
    worst = std::max(worst, std::fabs((up - down) / (2.0 * h) - analytic[k]));
  }
  return worst;
}

ShiftConfig separable_config(uint64_t seed) {
  ShiftConfig cfg;
  cfg.kind = ShiftKind::Covariate;
  cfg.classes = 2;
  cfg.points_per_domain = 60;
  cfg.input_dim = 2;
  cfg.class_mean_radius = 3.0;
  cfg.class_cov_scale = 0.3;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("parameter layout sizes match the architectures") {
  Model linear(ModelKind::LinearSoftmax, 9, 2);
  CHECK(linear.parameter_count() == 20);
  Model mlp(ModelKind::MlpOneHidden, 3, 4, 5);
  CHECK(mlp.parameter_count() == 5 * 3 + 5 + 4 * 5 + 4);
  CHECK_THROWS_AS(Model(ModelKind::LinearSoftmax, 0, 2), ConfigError);
  CHECK_THROWS_AS(Model(ModelKind::LinearSoftmax, 2, 1), ConfigError);
  CHECK_THROWS_AS(Model(ModelKind::MlpOneHidden, 2, 2, 0), ConfigError);
}

TEST_CASE("initialization stays inside the fan-in bound") {
  Model m(ModelKind::MlpOneHidden, 4, 3, 8);
  Rng rng(3);
  m.init_params(rng);
  double bound1 = 1.0 / std::sqrt(4.0);
  double bound2 = 1.0 / std::sqrt(8.0);
  const Vec& p = m.parameters();
  int first = 8 * 4 + 8;
  for (int i = 0; i < first; ++i) CHECK(std::fabs(p[i]) <= bound1);
  for (size_t i = first; i < p.size(); ++i) CHECK(std::fabs(p[i]) <= bound2);
}

TEST_CASE("outputs live on the simplex and snapshots are immutable") {
  Model m(ModelKind::LinearSoftmax, 3, 4);
  Rng rng(5);
  m.init_params(rng);
  Vec x = {0.4, -1.2, 2.0};
  Vec p = m(x);
  double total = 0.0;
  for (double v : p) {
    CHECK(v >= 0.0);
    total += v;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  ModelFn snap = m.fn();
  Vec before = snap(x);
  Vec zeros(m.parameter_count(), 0.0);
  m.set_parameters(zeros);
  CHECK(snap(x) == before);
  CHECK(m(x) != before);
}

TEST_CASE("parameter setters reject malformed vectors") {
  Model m(ModelKind::LinearSoftmax, 2, 2);
  CHECK_THROWS_AS(m.set_parameters(Vec(5, 0.0)), DimensionMismatch);
  Vec bad(m.parameter_count(), 0.0);
  bad[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(m.set_parameters(bad), ConfigError);
}

TEST_CASE("hidden features exist only on the mlp") {
  Model mlp(ModelKind::MlpOneHidden, 2, 2, 6);
  Rng rng(7);
  mlp.init_params(rng);
  CHECK(static_cast<int>(mlp.hidden({0.5, -0.5}).size()) == 6);
  Model linear(ModelKind::LinearSoftmax, 2, 2);
  CHECK_THROWS_AS(linear.hidden({0.5, -0.5}), FeatureTermUnavailable);
}

TEST_CASE("plain risk gradient matches finite differences on a 20-parameter model") {
  TrainConfig cfg;
  cfg.objective = Objective::Erm;
  cfg.loss = TrainLoss::Euclidean;
  cfg.model = ModelKind::LinearSoftmax;
  EmpiricalJoint bp = random_batch(Rng(21), 8, 9, 2);
  EmpiricalJoint bq = random_batch(Rng(22), 8, 9, 2);
  Model m = make_model(cfg, 9, 2, 23);
  CHECK(max_abs_gradient_gap(m, bp, bq, cfg, 1e-5) < 1e-5);
  cfg.loss = TrainLoss::CrossEntropy;
  CHECK(max_abs_gradient_gap(m, bp, bq, cfg, 1e-5) < 1e-5);
}

TEST_CASE("transport-regularized surrogate gradients match finite differences") {
  for (Objective obj : {Objective::Wrr, Objective::LjeOracle, Objective::CcOracle}) {
    TrainConfig cfg;
    cfg.objective = obj;
    cfg.loss = TrainLoss::CrossEntropy;
    cfg.model = ModelKind::LinearSoftmax;
    cfg.wasserstein_order = 1;
    EmpiricalJoint bp = random_batch(Rng(31), 10, 3, 2);
    EmpiricalJoint bq = random_batch(Rng(32), 9, 3, 2);
    Model m = make_model(cfg, 3, 2, 33);
    CHECK(max_abs_gradient_gap(m, bp, bq, cfg, 1e-5) < 1e-4);
  }
}

TEST_CASE("order-2 and feature-term gradients match finite differences on the mlp") {
  TrainConfig cfg;
  cfg.objective = Objective::JdotLite;
  cfg.loss = TrainLoss::Euclidean;
  cfg.model = ModelKind::MlpOneHidden;
  cfg.hidden_units = 5;
  cfg.activation = Activation::Tanh;
  cfg.wasserstein_order = 2;
  EmpiricalJoint bp = random_batch(Rng(41), 9, 3, 3);
  EmpiricalJoint bq = random_batch(Rng(42), 8, 3, 3);
  Model m = make_model(cfg, 3, 3, 43);
  CHECK(max_abs_gradient_gap(m, bp, bq, cfg, 1e-5) < 1e-4);
}

TEST_CASE("feature-regularized objective refuses models without features") {
  TrainConfig cfg;
  cfg.objective = Objective::JdotLite;
  cfg.model = ModelKind::LinearSoftmax;
  EmpiricalJoint bp = random_batch(Rng(51), 6, 2, 2);
  EmpiricalJoint bq = random_batch(Rng(52), 6, 2, 2);
  Model m = make_model(cfg, 2, 2, 53);
  CHECK_THROWS_AS(objective_value(m, bp, bq, cfg), FeatureTermUnavailable);
}

TEST_CASE("per-class objective demands every class in both batches") {
  TrainConfig cfg;
  cfg.objective = Objective::CcOracle;
  cfg.model = ModelKind::LinearSoftmax;
  EmpiricalJoint bp({{0.0, 0.0}, {1.0, 1.0}}, {0, 0}, {0.5, 0.5}, 2);
  EmpiricalJoint bq = random_batch(Rng(61), 6, 2, 2);
  Model m = make_model(cfg, 2, 2, 62);
  CHECK_THROWS_AS(objective_value(m, bp, bq, cfg), MissingClass);
}

TEST_CASE("objective terms expose the pieces they sum") {
  TrainConfig cfg;
  cfg.objective = Objective::Wrr;
  cfg.loss = TrainLoss::Euclidean;
  cfg.model = ModelKind::LinearSoftmax;
  cfg.wrr_weight = 0.7;
  EmpiricalJoint bp = random_batch(Rng(71), 8, 2, 2);
  EmpiricalJoint bq = random_batch(Rng(72), 8, 2, 2);
  Model m = make_model(cfg, 2, 2, 73);
  ObjectiveTerms t = objective_value(m, bp, bq, cfg);
  CHECK(t.value == doctest::Approx(t.risk_p + 0.7 * t.w_marginal).epsilon(1e-12));
  CHECK(t.w_marginal > 0.0);

  cfg.objective = Objective::LjeOracle;
  ObjectiveTerms lje = objective_value(m, bp, bq, cfg);
  CHECK(lje.value == doctest::Approx(lje.risk_p + lje.risk_q).epsilon(1e-12));

  cfg.objective = Objective::CcOracle;
  ObjectiveTerms cc = objective_value(m, bp, bq, cfg);
  CHECK(cc.active_class >= 0);
  CHECK(cc.value == doctest::Approx(cc.risk_p + cc.w_class_max).epsilon(1e-12));
}

TEST_CASE("training config validation rejects bad hyperparameters") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  TrainConfig bad = cfg;
  bad.lr = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.wasserstein_order = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.beta2 = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("accuracy counts weighted argmax agreement") {
  EmpiricalJoint j({{1.0, 0.0}, {0.0, 1.0}}, {0, 1}, {0.25, 0.75}, 2);
  Model m(ModelKind::LinearSoftmax, 2, 2);
  Vec params = {4.0, 0.0, 0.0, 4.0, 0.0, 0.0};  // W rows pick out coordinates
  m.set_parameters(params);
  CHECK(accuracy(j, m) == doctest::Approx(1.0));
  Vec flipped = {0.0, 4.0, 4.0, 0.0, 0.0, 0.0};
  m.set_parameters(flipped);
  CHECK(accuracy(j, m) == doctest::Approx(0.0));
}

TEST_CASE("joint-label training solves an easy pair within ten epochs") {
  Scenario sc = generate(separable_config(81));
  TrainConfig cfg;
  cfg.objective = Objective::LjeOracle;
  cfg.loss = TrainLoss::CrossEntropy;
  cfg.model = ModelKind::LinearSoftmax;
  cfg.optimizer = OptimizerKind::Adam;
  cfg.lr = 0.2;
  cfg.batch_size = 30;
  cfg.epochs = 10;
  cfg.seed = 82;
  FitResult res = fit(sc.source, sc.target, cfg);
  REQUIRE(static_cast<int>(res.history.size()) == 10);
  CHECK(res.history.back().tgt_acc > 0.95);
  CHECK(res.history.back().src_acc > 0.95);
}

TEST_CASE("plain source training transfers across a zero shift") {
  Scenario sc = generate(separable_config(91));
  TrainConfig cfg;
  cfg.objective = Objective::Erm;
  cfg.loss = TrainLoss::CrossEntropy;
  cfg.model = ModelKind::LinearSoftmax;
  cfg.lr = 0.2;
  cfg.batch_size = 30;
  cfg.epochs = 10;
  cfg.seed = 92;
  FitResult res = fit(sc.source, sc.target, cfg);
  const HistoryRow& last = res.history.back();
  CHECK(std::fabs(last.src_acc - last.tgt_acc) <= 0.05);
  CHECK(last.src_acc > 0.9);
}

TEST_CASE("plain sgd also trains the easy pair") {
  Scenario sc = generate(separable_config(95));
  TrainConfig cfg;
  cfg.objective = Objective::Erm;
  cfg.loss = TrainLoss::CrossEntropy;
  cfg.optimizer = OptimizerKind::Sgd;
  cfg.lr = 0.5;
  cfg.batch_size = 30;
  cfg.epochs = 10;
  cfg.seed = 96;
  FitResult res = fit(sc.source, sc.target, cfg);
  CHECK(res.history.back().src_acc > 0.9);
}

TEST_CASE("divergence surfaces the last finite state") {
  Scenario sc = generate(separable_config(97));
  // A linear head with cross-entropy has bounded gradients and a log-sum-exp
  // loss, so no step size can push it to non-finite values. Relu hidden
  // layers compound instead, which overflows within a few steps.
  TrainConfig cfg;
  cfg.objective = Objective::Erm;
  cfg.loss = TrainLoss::CrossEntropy;
  cfg.model = ModelKind::MlpOneHidden;
  cfg.hidden_units = 8;
  cfg.activation = Activation::Relu;
  cfg.lr = 1e200;
  cfg.optimizer = OptimizerKind::Sgd;
  cfg.batch_size = 30;
  cfg.epochs = 5;
  cfg.seed = 98;
  try {
    fit(sc.source, sc.target, cfg);
    FAIL("expected divergence");
  } catch (const DivergedWithState& e) {
    CHECK(std::string(e.what()).find("diverged") != std::string::npos);
    for (double v : e.last_finite.model.parameters()) CHECK(std::isfinite(v));
  }
}

TEST_CASE("balanced sampling requires room for every class and nonempty classes") {
  Scenario sc = generate(separable_config(99));
  TrainConfig cfg;
  cfg.class_balanced_sampling = true;
  cfg.batch_size = 1;
  CHECK_THROWS_AS(fit(sc.source, sc.target, cfg), ConfigError);
}

TEST_CASE("history csv has the pinned header and one row per epoch") {
  std::vector<HistoryRow> rows(2);
  rows[0].epoch = 1;
  rows[1].epoch = 2;
  std::string csv = history_csv(rows);
  CHECK(csv.rfind("epoch,src_acc,tgt_acc,risk_p,risk_q,w_marginal,entangle_y,objective\n", 0) ==
        0);
  size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 3);
}
