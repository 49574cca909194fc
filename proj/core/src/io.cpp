#include "entot/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace entot {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

json parse(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(std::string(what) + ": malformed JSON");
  return j;
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) fail(std::string(what) + ": expected a JSON object");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const char* what) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      fail(std::string(what) + ": unknown key \"" + item.key() + "\"");
}

double finite_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where + ": expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) fail(where + ": non-finite number");
  return d;
}

double get_number(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) fail(std::string(what) + ": missing \"" + key + "\"");
  return finite_number(j.at(key), std::string(what) + "." + key);
}

int get_int(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) fail(std::string(what) + ": missing \"" + key + "\"");
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(std::string(what) + "." + key + ": expected an integer");
  return v.get<int>();
}

Vec get_vector(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + ": expected an array of numbers");
  Vec out;
  out.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(finite_number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Vec> get_points(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where + ": expected a non-empty array of points");
  std::vector<Vec> out;
  out.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(get_vector(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Vec get_weights(const json& j, const char* what) {
  if (!j.contains("weights")) fail(std::string(what) + ": missing \"weights\"");
  Vec w = get_vector(j.at("weights"), std::string(what) + ".weights");
  for (double v : w)
    if (v < 0.0) fail(std::string(what) + ".weights: negative weight");
  return w;
}

ordered_json points_json(const std::vector<Vec>& pts) {
  ordered_json arr = ordered_json::array();
  for (const Vec& p : pts) arr.push_back(p);
  return arr;
}

template <typename E, size_t N>
std::string enum_name(E value, const std::pair<E, const char*> (&table)[N]) {
  for (const auto& [v, name] : table)
    if (v == value) return name;
  fail("unmapped enum value");
}

template <typename E, size_t N>
E enum_value(const json& j, const char* key, const char* what,
             const std::pair<E, const char*> (&table)[N]) {
  if (!j.contains(key)) fail(std::string(what) + ": missing \"" + key + "\"");
  if (!j.at(key).is_string()) fail(std::string(what) + "." + key + ": expected a string");
  std::string s = j.at(key).get<std::string>();
  for (const auto& [v, name] : table)
    if (s == name) return v;
  fail(std::string(what) + "." + key + ": unknown value \"" + s + "\"");
}

const std::pair<ShiftKind, const char*> kShiftKinds[] = {
    {ShiftKind::Covariate, "covariate"},
    {ShiftKind::LabelShift, "label_shift"},
    {ShiftKind::Gradual, "gradual"},
    {ShiftKind::Entangling, "entangling"}};

const std::pair<Objective, const char*> kObjectives[] = {
    {Objective::Erm, "erm"},
    {Objective::Wrr, "wrr"},
    {Objective::JdotLite, "jdot_lite"},
    {Objective::LjeOracle, "lje_oracle"},
    {Objective::CcOracle, "cc_oracle"}};

const std::pair<TrainLoss, const char*> kTrainLosses[] = {
    {TrainLoss::Euclidean, "euclidean"}, {TrainLoss::CrossEntropy, "cross_entropy"}};

const std::pair<ModelKind, const char*> kModelKinds[] = {
    {ModelKind::LinearSoftmax, "linear_softmax"}, {ModelKind::MlpOneHidden, "mlp_1hidden"}};

const std::pair<Activation, const char*> kActivations[] = {{Activation::Relu, "relu"},
                                                           {Activation::Tanh, "tanh"}};

const std::pair<OptimizerKind, const char*> kOptimizers[] = {{OptimizerKind::Sgd, "sgd"},
                                                             {OptimizerKind::Adam, "adam"}};

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write file: " + path);
  out << content;
  if (!out) fail("write failed: " + path);
}

DiscreteMeasure measure_from_json(const std::string& text) {
  json j = parse(text, "measure");
  require_object(j, "measure");
  reject_unknown(j, {"points", "weights", "labels", "num_classes"}, "measure");
  if (!j.contains("points")) fail("measure: missing \"points\"");
  return DiscreteMeasure(get_points(j.at("points"), "measure.points"),
                         get_weights(j, "measure"));
}

std::string measure_to_json(const DiscreteMeasure& m) {
  ordered_json j;
  j["points"] = points_json(m.points());
  j["weights"] = m.weights();
  return j.dump(2) + "\n";
}

EmpiricalJoint joint_from_json(const std::string& text) {
  json j = parse(text, "joint");
  require_object(j, "joint");
  reject_unknown(j, {"points", "weights", "labels", "num_classes"}, "joint");
  if (!j.contains("points")) fail("joint: missing \"points\"");
  if (!j.contains("labels")) fail("joint: missing \"labels\"");
  std::vector<Vec> pts = get_points(j.at("points"), "joint.points");
  Vec w = get_weights(j, "joint");
  const json& lab = j.at("labels");
  if (!lab.is_array()) fail("joint.labels: expected an array of integers");
  std::vector<int> labels;
  labels.reserve(lab.size());
  for (size_t i = 0; i < lab.size(); ++i) {
    if (!lab[i].is_number_integer()) fail("joint.labels: expected integers");
    labels.push_back(lab[i].get<int>());
  }
  int classes = get_int(j, "num_classes", "joint");
  return EmpiricalJoint(std::move(pts), std::move(labels), std::move(w), classes);
}

std::string joint_to_json(const EmpiricalJoint& jt) {
  ordered_json j;
  j["points"] = points_json(jt.inputs());
  j["weights"] = jt.weights();
  j["labels"] = jt.labels();
  j["num_classes"] = jt.num_classes();
  return j.dump(2) + "\n";
}

GaussianPair gaussian_pair_from_json(const std::string& text) {
  json j = parse(text, "gaussian");
  require_object(j, "gaussian");
  reject_unknown(j, {"mu", "mu_prime", "sigma", "scale", "dim_x"}, "gaussian");
  if (!j.contains("mu") || !j.contains("mu_prime") || !j.contains("sigma"))
    fail("gaussian: needs \"mu\", \"mu_prime\", \"sigma\"");
  Vec mu = get_vector(j.at("mu"), "gaussian.mu");
  Vec mu_prime = get_vector(j.at("mu_prime"), "gaussian.mu_prime");
  std::vector<Vec> rows = get_points(j.at("sigma"), "gaussian.sigma");
  std::vector<double> sigma;
  for (const Vec& r : rows) {
    if (r.size() != rows.size()) fail("gaussian.sigma: must be square");
    sigma.insert(sigma.end(), r.begin(), r.end());
  }
  double scale = get_number(j, "scale", "gaussian");
  int dim_x = get_int(j, "dim_x", "gaussian");
  return GaussianPair(std::move(mu), std::move(mu_prime), std::move(sigma), scale, dim_x);
}

std::string gaussian_pair_to_json(const GaussianPair& p) {
  ordered_json j;
  j["mu"] = p.mu();
  j["mu_prime"] = p.mu_prime();
  ordered_json rows = ordered_json::array();
  int d = p.dim();
  for (int r = 0; r < d; ++r) {
    Vec row(p.sigma().begin() + static_cast<size_t>(r) * d,
            p.sigma().begin() + static_cast<size_t>(r + 1) * d);
    rows.push_back(row);
  }
  j["sigma"] = rows;
  j["scale"] = p.scale();
  j["dim_x"] = p.dim_x();
  return j.dump(2) + "\n";
}

ShiftConfig shift_config_from_json(const std::string& text) {
  json j = parse(text, "scenario");
  require_object(j, "scenario");
  reject_unknown(j,
                 {"kind", "classes", "points_per_domain", "input_dim", "class_means",
                  "class_mean_radius", "class_cov_scale", "seed", "translation",
                  "target_weights", "gradual", "permutation"},
                 "scenario");
  ShiftConfig c;
  c.kind = enum_value(j, "kind", "scenario", kShiftKinds);
  if (j.contains("classes")) c.classes = get_int(j, "classes", "scenario");
  if (j.contains("points_per_domain"))
    c.points_per_domain = get_int(j, "points_per_domain", "scenario");
  if (j.contains("input_dim")) c.input_dim = get_int(j, "input_dim", "scenario");
  if (j.contains("class_means"))
    c.class_means = get_points(j.at("class_means"), "scenario.class_means");
  if (j.contains("class_mean_radius"))
    c.class_mean_radius = get_number(j, "class_mean_radius", "scenario");
  if (j.contains("class_cov_scale"))
    c.class_cov_scale = get_number(j, "class_cov_scale", "scenario");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer()) fail("scenario.seed: expected an integer");
    c.seed = j.at("seed").get<uint64_t>();
  }
  if (j.contains("translation"))
    c.translation = get_vector(j.at("translation"), "scenario.translation");
  if (j.contains("target_weights"))
    c.target_weights = get_vector(j.at("target_weights"), "scenario.target_weights");
  if (j.contains("gradual")) {
    const json& g = j.at("gradual");
    require_object(g, "scenario.gradual");
    reject_unknown(g, {"a", "epsilon", "s"}, "scenario.gradual");
    if (g.contains("a")) c.gradual.a = finite_number(g.at("a"), "scenario.gradual.a");
    if (g.contains("epsilon"))
      c.gradual.epsilon = finite_number(g.at("epsilon"), "scenario.gradual.epsilon");
    if (g.contains("s")) c.gradual.s = get_int(g, "s", "scenario.gradual");
  }
  if (j.contains("permutation")) {
    const json& p = j.at("permutation");
    if (!p.is_array()) fail("scenario.permutation: expected an array of integers");
    for (const auto& v : p) {
      if (!v.is_number_integer()) fail("scenario.permutation: expected integers");
      c.permutation.push_back(v.get<int>());
    }
  }
  return c;
}

std::string shift_config_to_json(const ShiftConfig& c) {
  ordered_json j;
  j["kind"] = enum_name(c.kind, kShiftKinds);
  j["classes"] = c.classes;
  j["points_per_domain"] = c.points_per_domain;
  j["input_dim"] = c.input_dim;
  if (!c.class_means.empty()) j["class_means"] = points_json(c.class_means);
  j["class_mean_radius"] = c.class_mean_radius;
  j["class_cov_scale"] = c.class_cov_scale;
  j["seed"] = c.seed;
  if (!c.translation.empty()) j["translation"] = c.translation;
  if (!c.target_weights.empty()) j["target_weights"] = c.target_weights;
  if (c.kind == ShiftKind::Gradual)
    j["gradual"] = ordered_json{{"a", c.gradual.a}, {"epsilon", c.gradual.epsilon},
                                {"s", c.gradual.s}};
  if (!c.permutation.empty()) j["permutation"] = c.permutation;
  return j.dump(2) + "\n";
}

TrainConfig train_config_from_json(const std::string& text) {
  json j = parse(text, "train");
  require_object(j, "train");
  reject_unknown(j,
                 {"objective", "loss", "model", "hidden_units", "activation", "optimizer", "lr",
                  "beta1", "beta2", "adam_eps", "batch_size", "epochs", "ot_method",
                  "sinkhorn_epsilon", "wasserstein_order", "class_balanced_sampling",
                  "feature_weight", "wrr_weight", "seed"},
                 "train");
  TrainConfig c;
  if (j.contains("objective")) c.objective = enum_value(j, "objective", "train", kObjectives);
  if (j.contains("loss")) c.loss = enum_value(j, "loss", "train", kTrainLosses);
  if (j.contains("model")) c.model = enum_value(j, "model", "train", kModelKinds);
  if (j.contains("hidden_units")) c.hidden_units = get_int(j, "hidden_units", "train");
  if (j.contains("activation")) c.activation = enum_value(j, "activation", "train", kActivations);
  if (j.contains("optimizer")) c.optimizer = enum_value(j, "optimizer", "train", kOptimizers);
  if (j.contains("lr")) c.lr = get_number(j, "lr", "train");
  if (j.contains("beta1")) c.beta1 = get_number(j, "beta1", "train");
  if (j.contains("beta2")) c.beta2 = get_number(j, "beta2", "train");
  if (j.contains("adam_eps")) c.adam_eps = get_number(j, "adam_eps", "train");
  if (j.contains("batch_size")) c.batch_size = get_int(j, "batch_size", "train");
  if (j.contains("epochs")) c.epochs = get_int(j, "epochs", "train");
  if (j.contains("ot_method")) {
    std::string s = j.at("ot_method").is_string() ? j.at("ot_method").get<std::string>() : "";
    if (s == "exact")
      c.ot_method = OtMethod::exact();
    else if (s == "sinkhorn")
      c.ot_method = OtMethod::sinkhorn(c.ot_method.epsilon);
    else
      fail("train.ot_method: expected \"exact\" or \"sinkhorn\"");
  }
  if (j.contains("sinkhorn_epsilon"))
    c.ot_method.epsilon = get_number(j, "sinkhorn_epsilon", "train");
  if (j.contains("wasserstein_order"))
    c.wasserstein_order = get_int(j, "wasserstein_order", "train");
  if (j.contains("class_balanced_sampling")) {
    if (!j.at("class_balanced_sampling").is_boolean())
      fail("train.class_balanced_sampling: expected a boolean");
    c.class_balanced_sampling = j.at("class_balanced_sampling").get<bool>();
  }
  if (j.contains("feature_weight")) c.feature_weight = get_number(j, "feature_weight", "train");
  if (j.contains("wrr_weight")) c.wrr_weight = get_number(j, "wrr_weight", "train");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer()) fail("train.seed: expected an integer");
    c.seed = j.at("seed").get<uint64_t>();
  }
  c.validate();
  return c;
}

std::string train_config_to_json(const TrainConfig& c) {
  ordered_json j;
  j["objective"] = enum_name(c.objective, kObjectives);
  j["loss"] = enum_name(c.loss, kTrainLosses);
  j["model"] = enum_name(c.model, kModelKinds);
  j["hidden_units"] = c.hidden_units;
  j["activation"] = enum_name(c.activation, kActivations);
  j["optimizer"] = enum_name(c.optimizer, kOptimizers);
  j["lr"] = c.lr;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["adam_eps"] = c.adam_eps;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["ot_method"] = c.ot_method.kind == OtMethod::Kind::Exact ? "exact" : "sinkhorn";
  j["sinkhorn_epsilon"] = c.ot_method.epsilon;
  j["wasserstein_order"] = c.wasserstein_order;
  j["class_balanced_sampling"] = c.class_balanced_sampling;
  j["feature_weight"] = c.feature_weight;
  j["wrr_weight"] = c.wrr_weight;
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

Model model_from_json(const std::string& text) {
  json j = parse(text, "model");
  require_object(j, "model");
  reject_unknown(j, {"kind", "input_dim", "num_classes", "hidden_units", "activation", "params"},
                 "model");
  ModelKind kind = enum_value(j, "kind", "model", kModelKinds);
  int input_dim = get_int(j, "input_dim", "model");
  int classes = get_int(j, "num_classes", "model");
  int hidden = j.contains("hidden_units") ? get_int(j, "hidden_units", "model") : 0;
  Activation act = j.contains("activation") ? enum_value(j, "activation", "model", kActivations)
                                            : Activation::Relu;
  Model m(kind, input_dim, classes, hidden, act);
  if (!j.contains("params")) fail("model: missing \"params\"");
  m.set_parameters(get_vector(j.at("params"), "model.params"));
  return m;
}

std::string model_to_json(const Model& m) {
  ordered_json j;
  j["kind"] = enum_name(m.kind(), kModelKinds);
  j["input_dim"] = m.input_dim();
  j["num_classes"] = m.num_classes();
  if (m.kind() == ModelKind::MlpOneHidden) {
    j["hidden_units"] = m.hidden_units();
    j["activation"] = enum_name(m.activation(), kActivations);
  }
  j["params"] = m.parameters();
  return j.dump(2) + "\n";
}

std::string coupling_to_json(const Coupling& c) {
  ordered_json j;
  j["n"] = c.n;
  j["m"] = c.m;
  ordered_json plan = ordered_json::array();
  for (int i = 0; i < c.n; ++i) {
    Vec row(c.plan.begin() + static_cast<size_t>(i) * c.m,
            c.plan.begin() + static_cast<size_t>(i + 1) * c.m);
    plan.push_back(row);
  }
  j["plan"] = plan;
  j["objective"] = c.objective;
  j["row_marginal"] = c.row_marginal;
  j["col_marginal"] = c.col_marginal;
  j["converged"] = c.converged;
  if (!c.dual_row.empty()) {
    j["dual_row"] = c.dual_row;
    j["dual_col"] = c.dual_col;
  }
  return j.dump(2) + "\n";
}

std::string entanglement_report_to_csv(const EntanglementReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "label_entanglement,prediction_entanglement,marginal_output_w1,label_shift_w1,"
                "source_risk,target_risk,oub,wrr\n"
                "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                r.label_entanglement, r.prediction_entanglement, r.marginal_output_w1,
                r.label_shift_w1, r.source_risk, r.target_risk, r.oub, r.wrr);
  return buf;
}

std::string entanglement_report_to_json(const EntanglementReport& r) {
  ordered_json j;
  j["label_entanglement"] = r.label_entanglement;
  j["prediction_entanglement"] = r.prediction_entanglement;
  j["marginal_output_w1"] = r.marginal_output_w1;
  j["label_shift_w1"] = r.label_shift_w1;
  j["source_risk"] = r.source_risk;
  j["target_risk"] = r.target_risk;
  j["oub"] = r.oub;
  j["wrr"] = r.wrr;
  j["approximate"] = r.approximate;
  return j.dump(2) + "\n";
}

}  // namespace entot
