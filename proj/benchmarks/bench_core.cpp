// Hot-path timings: exact solver scaling, sinkhorn at training-time
// regularization, and the two costs that dominate a fit epoch.
#include <benchmark/benchmark.h>

#include "entot/entangle.hpp"
#include "entot/ot.hpp"
#include "entot/rng.hpp"
#include "entot/scenarios.hpp"
#include "entot/train.hpp"

using namespace entot;

namespace {

CostMatrix random_cost(Rng& rng, int n, int m) {
  CostMatrix c;
  c.n = n;
  c.m = m;
  c.entries.resize(static_cast<size_t>(n) * m);
  for (double& e : c.entries) e = rng.next_unit();
  return c;
}

Scenario bench_scenario(int points) {
  ShiftConfig cfg;
  cfg.kind = ShiftKind::Entangling;
  cfg.classes = 2;
  cfg.points_per_domain = points;
  cfg.input_dim = 2;
  cfg.class_cov_scale = 0.4;
  cfg.translation = {1.0, 0.5};
  cfg.seed = 11;
  return generate(cfg);
}

void bm_solve_exact(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Rng rng(1);
  CostMatrix c = random_cost(rng, n, n);
  Vec w(n, 1.0 / n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_exact(w, w, c).objective);
}
BENCHMARK(bm_solve_exact)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void bm_sinkhorn(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Rng rng(2);
  CostMatrix c = random_cost(rng, n, n);
  Vec w(n, 1.0 / n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_sinkhorn(w, w, c, 0.05).objective);
}
BENCHMARK(bm_sinkhorn)->Arg(16)->Arg(64);

void bm_label_entanglement(benchmark::State& state) {
  Scenario sc = bench_scenario(static_cast<int>(state.range(0)));
  Model model(ModelKind::LinearSoftmax, 2, 2);
  Rng init(3);
  model.init_params(init);
  ModelFn f = model.fn();
  LossSpec loss = LossSpec::euclidean();
  for (auto _ : state)
    benchmark::DoNotOptimize(label_entanglement(sc.source, sc.target, f, loss));
}
BENCHMARK(bm_label_entanglement)->Arg(64)->Arg(128);

void bm_wrr_gradient(benchmark::State& state) {
  Scenario sc = bench_scenario(static_cast<int>(state.range(0)));
  Model model(ModelKind::LinearSoftmax, 2, 2);
  Rng init(4);
  model.init_params(init);
  TrainConfig cfg;
  cfg.objective = Objective::Wrr;
  cfg.loss = TrainLoss::CrossEntropy;
  for (auto _ : state) benchmark::DoNotOptimize(gradient(model, sc.source, sc.target, cfg));
}
BENCHMARK(bm_wrr_gradient)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
