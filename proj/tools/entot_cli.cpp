#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "entot/bounds.hpp"
#include "entot/entangle.hpp"
#include "entot/gaussian.hpp"
#include "entot/io.hpp"
#include "entot/loss.hpp"
#include "entot/measures.hpp"
#include "entot/ot.hpp"
#include "entot/scenarios.hpp"
#include "entot/train.hpp"

namespace {

using namespace entot;

// Exit contract: 0 ok, 1 bound violated, 2 usage or input, 3 solver or
// numeric failure, 4 training divergence.
constexpr int kOk = 0;
constexpr int kViolated = 1;
constexpr int kUsage = 2;
constexpr int kSolver = 3;
constexpr int kDiverged = 4;

int log_threshold() {
  static int level = [] {
    const char* env = std::getenv("ENTANGLE_OT_LOG");
    if (!env) return 0;
    std::string s(env);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_threshold() >= 1) std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_threshold() >= 2) std::cerr << "[debug] " << msg << "\n";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const Diverged*>(&e)) return kDiverged;
  if (dynamic_cast<const BoundViolated*>(&e)) return kViolated;
  if (dynamic_cast<const ChainViolation*>(&e)) return kViolated;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DimensionMismatch*>(&e) ||
      dynamic_cast<const EmptyClass*>(&e) || dynamic_cast<const MissingClass*>(&e) ||
      dynamic_cast<const FeatureTermUnavailable*>(&e) || dynamic_cast<const NotSpd*>(&e))
    return kUsage;
  // SolverError, QuadratureNotConverged, ChainGenerationFailed, anything else
  return kSolver;
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty())
    std::cout << content;
  else
    write_text_file(out_path, content);
}

LossSpec loss_by_name(const std::string& name) {
  if (name == "euclidean") return LossSpec::euclidean();
  if (name == "squared_euclidean") return LossSpec::squared_euclidean();
  if (name == "kronecker") return LossSpec::kronecker();
  throw ConfigError("unknown loss \"" + name + "\"");
}

Model seeded_linear_model(int input_dim, int classes, uint64_t seed) {
  Model m(ModelKind::LinearSoftmax, input_dim, classes);
  Rng rng = Rng(seed).child(0xACE);
  m.init_params(rng);
  return m;
}

nlohmann::ordered_json reparse(const std::string& text) {
  return nlohmann::ordered_json::parse(text);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string reports_to_json(const std::vector<BoundReport>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const BoundReport& r : rows) {
    nlohmann::ordered_json j;
    j["bound_id"] = to_string(r.id);
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["slack"] = r.slack;
    j["passed"] = r.passed;
    j["applicable"] = r.applicable;
    j["context"] = r.context;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

struct CommonArgs {
  std::string out;
  std::string format = "csv";
  uint64_t seed = 0;
  bool seed_given = false;
  double tolerance = 1e-7;
};

// ---- ot ----------------------------------------------------------------

struct OtArgs : CommonArgs {
  std::string mu_file, nu_file;
  double alpha = 1.0;
  std::string method = "exact";
  double epsilon = 0.05;
};

int cmd_ot(const OtArgs& a) {
  DiscreteMeasure mu = measure_from_json(read_text_file(a.mu_file));
  DiscreteMeasure nu = measure_from_json(read_text_file(a.nu_file));
  if (mu.dim() != nu.dim()) throw DimensionMismatch("measures have different dimensions");
  log_info("transport instance " + std::to_string(mu.size()) + " x " +
           std::to_string(nu.size()));
  CostMatrix base = CostMatrix::from_points(mu.points(), nu.points(),
                                            [](const Vec& x, const Vec& y) {
                                              return euclidean_distance(x, y);
                                            });
  OtMethod method = a.method == "sinkhorn" ? OtMethod::sinkhorn(a.epsilon) : OtMethod::exact();
  Coupling coupling = solve(mu.weights(), nu.weights(), base.powered(a.alpha), method);
  if (!coupling.converged) throw SolverError("sinkhorn did not converge within its budget");
  double w = std::pow(std::max(coupling.objective, 0.0), 1.0 / a.alpha);
  if (a.format == "json")
    std::cout << "{\"wasserstein\": " << format_double(w) << "}\n";
  else
    std::cout << format_double(w) << "\n";
  if (!a.out.empty()) write_text_file(a.out, coupling_to_json(coupling));
  return kOk;
}

// ---- verify ------------------------------------------------------------

struct VerifyArgs : CommonArgs {
  std::string scenario_file;
  std::string source_file, target_file;
  std::string model_file;
  std::string gaussian_file;
  std::string loss = "euclidean";
  double kappa = 0.0;
  double risk_budget = 0.1;
  int repeat = 1;
  int jobs = 1;
};

std::vector<BoundReport> verify_once(const VerifyArgs& a, uint64_t seed) {
  EmpiricalJoint source({{0.0}}, {0}, {1.0}, 2);  // placeholder, reassigned below
  EmpiricalJoint target = source;
  std::vector<EmpiricalJoint> chain;
  AssumptionParams params;
  params.kappa = a.kappa;
  params.b = a.risk_budget;
  if (!a.scenario_file.empty()) {
    ShiftConfig cfg = shift_config_from_json(read_text_file(a.scenario_file));
    if (a.seed_given) cfg.seed = seed;
    log_info("generating scenario seed=" + std::to_string(cfg.seed));
    Scenario sc = generate(cfg);
    source = std::move(sc.source);
    target = std::move(sc.target);
    chain = std::move(sc.chain);
    if (cfg.kind == ShiftKind::Gradual) {
      params.a = cfg.gradual.a;
      params.epsilon = cfg.gradual.epsilon;
      params.s = cfg.gradual.s;
    }
  } else {
    source = joint_from_json(read_text_file(a.source_file));
    target = joint_from_json(read_text_file(a.target_file));
  }
  Model model = a.model_file.empty()
                    ? seeded_linear_model(source.dim(), source.num_classes(), seed)
                    : model_from_json(read_text_file(a.model_file));
  LossSpec loss = loss_by_name(a.loss);
  std::vector<BoundReport> rows =
      run_bound_suite(source, target, chain, model.fn(), loss, params, a.tolerance);
  for (const BoundReport& r : rows)
    log_debug(std::string(to_string(r.id)) + " slack=" + format_double(r.slack));
  return rows;
}

int cmd_verify(const VerifyArgs& a) {
  if (a.scenario_file.empty() && (a.source_file.empty() || a.target_file.empty()))
    throw ConfigError("verify needs --scenario or both --source and --target");
  if (a.repeat < 1) throw ConfigError("--repeat must be at least 1");
  if (a.repeat > 1 && a.scenario_file.empty())
    throw ConfigError("--repeat needs --scenario (fixed measure files cannot vary by seed)");

  std::vector<std::vector<BoundReport>> per_run(a.repeat);
  std::vector<std::exception_ptr> errors(a.repeat);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= a.repeat) return;
      try {
        per_run[i] = verify_once(a, a.seed + static_cast<uint64_t>(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int threads = std::max(1, std::min(a.jobs, a.repeat));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (int i = 0; i < a.repeat; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);

  std::vector<BoundReport> rows;
  for (std::vector<BoundReport>& chunk : per_run)
    for (BoundReport& r : chunk) rows.push_back(std::move(r));
  if (!a.gaussian_file.empty()) {
    GaussianPair pair = gaussian_pair_from_json(read_text_file(a.gaussian_file));
    rows.push_back(gaussian_decomposition_report(verify_scaled_decomposition(pair, a.seed)));
  }
  emit(a.format == "json" ? reports_to_json(rows) : bound_reports_csv(rows), a.out);
  for (const BoundReport& r : rows)
    if (!r.passed) return kViolated;
  return kOk;
}

// ---- train -------------------------------------------------------------

struct TrainArgs : CommonArgs {
  std::string scenario_file;
  std::string config_file;
  std::string model_out;
};

std::string summary_row(const EmpiricalJoint& source, const EmpiricalJoint& target,
                        const FitResult& res) {
  const HistoryRow& last = res.history.back();
  double w_label = label_shift_w1(source, target, LossSpec::euclidean());
  std::string s = "src_acc,tgt_acc,risk_p,risk_q,w_label,entangle_y\n";
  s += format_double(last.src_acc) + "," + format_double(last.tgt_acc) + "," +
       format_double(last.risk_p) + "," + format_double(last.risk_q) + "," +
       format_double(w_label) + "," + format_double(last.entangle_y) + "\n";
  return s;
}

int cmd_train(const TrainArgs& a) {
  ShiftConfig scfg = shift_config_from_json(read_text_file(a.scenario_file));
  TrainConfig tcfg = train_config_from_json(read_text_file(a.config_file));
  if (a.seed_given) {
    scfg.seed = a.seed;
    tcfg.seed = a.seed;
  }
  log_info("generating scenario seed=" + std::to_string(scfg.seed));
  Scenario sc = generate(scfg);
  try {
    FitResult res = fit(sc.source, sc.target, tcfg);
    emit(history_csv(res.history), a.out);
    if (!a.model_out.empty()) write_text_file(a.model_out, model_to_json(res.model));
    std::string summary = summary_row(sc.source, sc.target, res);
    if (a.out.empty())
      std::cerr << summary;  // keep stdout parseable as the history CSV
    else
      std::cout << summary;
    return kOk;
  } catch (const DivergedWithState& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (!e.last_finite.history.empty()) emit(history_csv(e.last_finite.history), a.out);
    if (!a.model_out.empty()) write_text_file(a.model_out, model_to_json(e.last_finite.model));
    return kDiverged;
  }
}

// ---- entangle ----------------------------------------------------------

struct EntangleArgs : CommonArgs {
  std::string scenario_file;
  std::string source_file, target_file;
  std::string model_file;
  std::string loss = "euclidean";
  std::string method = "exact";
  double epsilon = 0.05;
};

int cmd_entangle(const EntangleArgs& a) {
  if (a.scenario_file.empty() && (a.source_file.empty() || a.target_file.empty()))
    throw ConfigError("entangle needs --scenario or both --source and --target");
  EmpiricalJoint source({{0.0}}, {0}, {1.0}, 2);
  EmpiricalJoint target = source;
  if (!a.scenario_file.empty()) {
    ShiftConfig cfg = shift_config_from_json(read_text_file(a.scenario_file));
    if (a.seed_given) cfg.seed = a.seed;
    Scenario sc = generate(cfg);
    source = std::move(sc.source);
    target = std::move(sc.target);
  } else {
    source = joint_from_json(read_text_file(a.source_file));
    target = joint_from_json(read_text_file(a.target_file));
  }
  Model model = a.model_file.empty()
                    ? seeded_linear_model(source.dim(), source.num_classes(), a.seed)
                    : model_from_json(read_text_file(a.model_file));
  LossSpec loss = loss_by_name(a.loss);
  OtMethod method = a.method == "sinkhorn" ? OtMethod::sinkhorn(a.epsilon) : OtMethod::exact();
  EntanglementReport rep = oracle_upper_bound(source, target, model.fn(), loss, method);
  emit(a.format == "json" ? entanglement_report_to_json(rep) : entanglement_report_to_csv(rep),
       a.out);
  return kOk;
}

// ---- gaussian ----------------------------------------------------------

struct GaussianArgs : CommonArgs {
  std::string pair_file;
  int samples = 100000;
};

int cmd_gaussian(const GaussianArgs& a) {
  GaussianPair pair = gaussian_pair_from_json(read_text_file(a.pair_file));
  DecompositionCheck check = verify_scaled_decomposition(pair, a.seed, a.samples);
  std::string content;
  if (a.format == "json") {
    nlohmann::ordered_json j;
    j["joint"] = check.joint;
    j["label_term"] = check.label_term;
    j["conditional_term"] = check.conditional_term;
    j["rhs"] = check.rhs;
    j["mc_std_error"] = check.mc_std_error;
    j["samples"] = check.samples;
    j["tolerance"] = check.tolerance;
    j["passed"] = check.passed;
    content = j.dump(2) + "\n";
  } else {
    content =
        "joint,label_term,conditional_term,rhs,mc_std_error,samples,tolerance,passed\n" +
        format_double(check.joint) + "," + format_double(check.label_term) + "," +
        format_double(check.conditional_term) + "," + format_double(check.rhs) + "," +
        format_double(check.mc_std_error) + "," + std::to_string(check.samples) + "," +
        format_double(check.tolerance) + "," + (check.passed ? "true" : "false") + "\n";
  }
  emit(content, a.out);
  return check.passed ? kOk : kViolated;
}

// ---- gen ---------------------------------------------------------------

struct GenArgs : CommonArgs {
  std::string config_file;
};

int cmd_gen(const GenArgs& a) {
  ShiftConfig cfg = shift_config_from_json(read_text_file(a.config_file));
  if (a.seed_given) cfg.seed = a.seed;
  Scenario sc = generate(cfg);
  nlohmann::ordered_json bundle;
  bundle["source"] = reparse(joint_to_json(sc.source));
  bundle["target"] = reparse(joint_to_json(sc.target));
  if (!sc.chain.empty()) {
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const EmpiricalJoint& stage : sc.chain) stages.push_back(reparse(joint_to_json(stage)));
    bundle["chain"] = std::move(stages);
  }
  emit(bundle.dump(2) + "\n", a.out);
  return kOk;
}

void add_common(CLI::App* sub, CommonArgs& c, bool with_format = true) {
  sub->add_option("--out", c.out, "write the report to this path instead of stdout");
  sub->add_option("--seed", c.seed, "seed override")->each([&c](const std::string&) {
    c.seed_given = true;
  });
  sub->add_option("--tolerance", c.tolerance, "slack tolerance for certified inequalities");
  if (with_format)
    sub->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transport-based shift diagnostics: distances, entanglement, certified bounds"};
  app.require_subcommand(1);

  OtArgs ot_args;
  CLI::App* ot_cmd = app.add_subcommand("ot", "transport distance between two measure files");
  ot_cmd->add_option("mu", ot_args.mu_file, "first measure JSON")->required();
  ot_cmd->add_option("nu", ot_args.nu_file, "second measure JSON")->required();
  ot_cmd->add_option("--alpha", ot_args.alpha, "transport order")
      ->check(CLI::Range(1.0, 16.0));
  ot_cmd->add_option("--method", ot_args.method, "solver")
      ->check(CLI::IsMember({"exact", "sinkhorn"}));
  ot_cmd->add_option("--epsilon", ot_args.epsilon, "sinkhorn regularization");
  add_common(ot_cmd, ot_args);

  VerifyArgs verify_args;
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the certified bound suite");
  verify_cmd->add_option("--scenario", verify_args.scenario_file, "scenario config JSON");
  verify_cmd->add_option("--source", verify_args.source_file, "source joint JSON");
  verify_cmd->add_option("--target", verify_args.target_file, "target joint JSON");
  verify_cmd->add_option("--model", verify_args.model_file,
                         "model JSON (default: seeded random linear model)");
  verify_cmd->add_option("--gaussian", verify_args.gaussian_file,
                         "also check the scaled-covariance identity on this pair file");
  verify_cmd->add_option("--loss", verify_args.loss, "label loss")
      ->check(CLI::IsMember({"euclidean", "squared_euclidean", "kronecker"}));
  verify_cmd->add_option("--kappa", verify_args.kappa,
                         "conditional-closeness level probed by the unavoidable-risk check");
  verify_cmd->add_option("--risk-budget", verify_args.risk_budget,
                         "source-risk budget for gradual-chain checks");
  verify_cmd->add_option("--repeat", verify_args.repeat, "independent seeded repetitions");
  verify_cmd->add_option("--jobs", verify_args.jobs, "worker threads for --repeat");
  add_common(verify_cmd, verify_args);

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "fit a model on a generated scenario");
  train_cmd->add_option("--scenario", train_args.scenario_file, "scenario config JSON")
      ->required();
  train_cmd->add_option("--config", train_args.config_file, "training config JSON")->required();
  train_cmd->add_option("--model-out", train_args.model_out, "write the final model JSON here");
  add_common(train_cmd, train_args, false);

  EntangleArgs entangle_args;
  CLI::App* entangle_cmd = app.add_subcommand("entangle", "one-shot entanglement report");
  entangle_cmd->add_option("--scenario", entangle_args.scenario_file, "scenario config JSON");
  entangle_cmd->add_option("--source", entangle_args.source_file, "source joint JSON");
  entangle_cmd->add_option("--target", entangle_args.target_file, "target joint JSON");
  entangle_cmd->add_option("--model", entangle_args.model_file,
                           "model JSON (default: seeded random linear model)");
  entangle_cmd->add_option("--loss", entangle_args.loss, "label loss")
      ->check(CLI::IsMember({"euclidean", "squared_euclidean", "kronecker"}));
  entangle_cmd->add_option("--method", entangle_args.method, "solver")
      ->check(CLI::IsMember({"exact", "sinkhorn"}));
  entangle_cmd->add_option("--epsilon", entangle_args.epsilon, "sinkhorn regularization");
  add_common(entangle_cmd, entangle_args);

  GaussianArgs gaussian_args;
  CLI::App* gaussian_cmd =
      app.add_subcommand("gaussian", "check the scaled-covariance decomposition identity");
  gaussian_cmd->add_option("pair", gaussian_args.pair_file, "gaussian pair JSON")->required();
  gaussian_cmd->add_option("--samples", gaussian_args.samples, "monte-carlo sample count")
      ->check(CLI::Range(1000, 10000000));
  add_common(gaussian_cmd, gaussian_args);

  GenArgs gen_args;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a scenario and export it as JSON");
  gen_cmd->add_option("--config", gen_args.config_file, "scenario config JSON")->required();
  add_common(gen_cmd, gen_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ot_cmd) return cmd_ot(ot_args);
    if (*verify_cmd) return cmd_verify(verify_args);
    if (*train_cmd) return cmd_train(train_args);
    if (*entangle_cmd) return cmd_entangle(entangle_args);
    if (*gaussian_cmd) return cmd_gaussian(gaussian_args);
    if (*gen_cmd) return cmd_gen(gen_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kUsage;
}
