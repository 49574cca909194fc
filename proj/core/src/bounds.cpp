#include "entot/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "entot/ot.hpp"

namespace entot {

const char* to_string(BoundId id) {
  switch (id) {
    case BoundId::RiskChainRaw: return "risk_chain_raw";
    case BoundId::RiskChainPushforward: return "risk_chain_pushforward";
    case BoundId::RiskViaLabelEntanglement: return "risk_via_label_entanglement";
    case BoundId::RiskViaPredictionEntanglement: return "risk_via_prediction_entanglement";
    case BoundId::ConvertLabelToPrediction: return "convert_label_to_prediction";
    case BoundId::ConvertPredictionToLabel: return "convert_prediction_to_label";
    case BoundId::ObjectiveEquivalenceLower: return "objective_equivalence_lower";
    case BoundId::ObjectiveEquivalenceUpper: return "objective_equivalence_upper";
    case BoundId::LabelShiftLower: return "label_shift_lower";
    case BoundId::CcToLje: return "cc_to_lje";
    case BoundId::NotCc: return "not_cc";
    case BoundId::CcOubTightness: return "cc_oub_tightness";
    case BoundId::GsImpliesCc: return "gs_implies_cc";
    case BoundId::GsEntanglementCap: return "gs_entanglement_cap";
    case BoundId::KappaVariantOutput: return "kappa_variant_output";
    case BoundId::KappaVariantLabel: return "kappa_variant_label";
    case BoundId::KlOutput: return "kl_output";
    case BoundId::KlLabel: return "kl_label";
    case BoundId::GaussianScaledDecomposition: return "gaussian_scaled_decomposition";
  }
  return "unknown";
}

void AssumptionParams::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("assumption params: ") + name + " must be non-negative");
  };
  nonneg(lambda, "lambda");
  nonneg(kappa, "kappa");
  nonneg(delta, "delta");
  nonneg(b, "b");
  nonneg(epsilon, "epsilon");
  if (s < 1) throw ConfigError("assumption params: s must be at least 1");
  if (a < 1.0 / s - 1e-12 || a > 1.0 + 1e-12)
    throw ConfigError("assumption params: a must lie in [1/s, 1]");
  if (varkappa < 1.0) throw ConfigError("assumption params: varkappa must be at least 1");
}

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[192];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

BoundReport make_report(BoundId id, double lhs, double rhs, double tol, std::string context) {
  BoundReport r;
  r.id = id;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.passed = r.slack >= -tol;
  r.context = std::move(context);
  return r;
}

BoundReport not_applicable(BoundId id, std::string reason) {
  BoundReport r;
  r.id = id;
  r.passed = true;
  r.applicable = false;
  r.context = "not-applicable: " + std::move(reason);
  return r;
}

CostFn loss_fn(const LossSpec& loss) {
  return [&loss](const Vec& a, const Vec& b) { return loss(a, b); };
}

struct CcLevel {
  bool ok = false;
  double max_w1 = 0.0;
  double source_risk = 0.0;
  double value = 0.0;
  int argmax_class = -1;
};

// kappa_hat(f) = R_p(f) + max over classes present in both domains of the
// distance between pushforward class conditionals.
CcLevel measured_cc_level(const EmpiricalJoint& p, const EmpiricalJoint& q, const ModelFn& f,
                          const LossSpec& loss) {
  CcLevel out;
  EmpiricalJoint fp = pushforward(p, f);
  EmpiricalJoint fq = pushforward(q, f);
  Vec pm = class_masses(p);
  Vec qm = class_masses(q);
  for (int c = 0; c < p.num_classes(); ++c) {
    if (pm[c] <= 0.0 || qm[c] <= 0.0) continue;
    double w = wasserstein(conditional(fp, c), conditional(fq, c), loss_fn(loss), 1.0);
    if (!out.ok || w > out.max_w1) {
      out.max_w1 = w;
      out.argmax_class = c;
    }
    out.ok = true;
  }
  out.source_risk = risk(p, f, loss);
  out.value = out.source_risk + out.max_w1;
  return out;
}

bool injective_on_support(const EmpiricalJoint& p, const EmpiricalJoint& q, const ModelFn& f) {
  std::map<Vec, Vec> image;  // input -> output over the union support
  for (const EmpiricalJoint* j : {&p, &q})
    for (const Vec& x : j->inputs())
      image.try_emplace(x, f(x));
  std::map<Vec, const Vec*> preimage;
  for (const auto& [x, y] : image) {
    auto [it, fresh] = preimage.try_emplace(y, &x);
    if (!fresh) return false;
  }
  return true;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// KL divergence between two sparse histograms; +inf when the first puts mass
// where the second has none.
double kl_divergence(const std::map<std::vector<int>, double>& hp,
                     const std::map<std::vector<int>, double>& hq) {
  double kl = 0.0;
  for (const auto& [bin, mass] : hp) {
    if (mass <= 0.0) continue;
    auto it = hq.find(bin);
    if (it == hq.end() || it->second <= 0.0) return kInf;
    kl += mass * std::log(mass / it->second);
  }
  return std::max(kl, 0.0);
}

std::map<std::vector<int>, double> output_histogram(const EmpiricalJoint& pushed, int bins) {
  std::map<std::vector<int>, double> h;
  for (int i = 0; i < pushed.size(); ++i) {
    if (pushed.weights()[i] <= 0.0) continue;
    std::vector<int> key(pushed.dim());
    for (int d = 0; d < pushed.dim(); ++d) {
      double v = std::min(1.0, std::max(0.0, pushed.inputs()[i][d]));
      key[d] = std::min(bins - 1, static_cast<int>(v * bins));
    }
    h[key] += pushed.weights()[i];
  }
  return h;
}

double kl_discrete(const Vec& a, const Vec& b) {
  double kl = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] <= 0.0) continue;
    if (b[i] <= 0.0) return kInf;
    kl += a[i] * std::log(a[i] / b[i]);
  }
  return std::max(kl, 0.0);
}

// Largest output-space class-conditional distance across consecutive chain
// links, stage 0 being the source.
double max_output_link(const EmpiricalJoint& p, const std::vector<EmpiricalJoint>& chain,
                       const ModelFn& f, const LossSpec& loss) {
  double mx = 0.0;
  EmpiricalJoint prev = pushforward(p, f);
  for (const EmpiricalJoint& stage : chain) {
    EmpiricalJoint cur = pushforward(stage, f);
    Vec am = class_masses(prev);
    Vec bm = class_masses(cur);
    for (int c = 0; c < p.num_classes(); ++c) {
      if (am[c] <= 0.0 || bm[c] <= 0.0) continue;
      mx = std::max(mx,
                    wasserstein(conditional(prev, c), conditional(cur, c), loss_fn(loss), 1.0));
    }
    prev = std::move(cur);
  }
  return mx;
}

}  // namespace

std::vector<BoundReport> check_lemma1_chain(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                            const ModelFn& f, const LossSpec& loss, double tol) {
  if (!loss.is_metric())
    return {not_applicable(BoundId::RiskChainRaw, "loss is not a metric"),
            not_applicable(BoundId::RiskChainPushforward, "loss is not a metric")};
  const int M = p.num_classes();
  double rp = risk(p, f, loss);
  double rq = risk(q, f, loss);

  // Transport on raw pairs: split cost evaluated through f on the inputs.
  std::vector<Vec> fp_out, fq_out;
  fp_out.reserve(p.size());
  fq_out.reserve(q.size());
  for (const Vec& x : p.inputs()) fp_out.push_back(f(x));
  for (const Vec& x : q.inputs()) fq_out.push_back(f(x));
  CostMatrix raw;
  raw.n = p.size();
  raw.m = q.size();
  raw.entries.resize(static_cast<size_t>(raw.n) * raw.m);
  for (int i = 0; i < raw.n; ++i)
    for (int j = 0; j < raw.m; ++j)
      raw.entries[static_cast<size_t>(i) * raw.m + j] =
          loss(fp_out[i], fq_out[j]) +
          loss(one_hot(p.labels()[i], M), one_hot(q.labels()[j], M));
  double w_raw = solve_exact(p.weights(), q.weights(), raw).objective;

  double w_pushed = joint_wasserstein_decomposable(pushforward(p, f), pushforward(q, f), loss, 1.0);

  std::vector<BoundReport> out;
  out.push_back(make_report(BoundId::RiskChainRaw, rq, rp + w_raw, tol,
                            fmt("risk_p=%.6g transport_raw=%.6g", rp, w_raw)));
  BoundReport second = make_report(BoundId::RiskChainPushforward, w_raw, w_pushed, tol, "");
  if (injective_on_support(p, q, f)) {
    second.passed = std::fabs(second.slack) <= tol;
    second.context = "tight: f injective on support";
  } else {
    second.context = "one-sided: f not injective on support";
  }
  out.push_back(std::move(second));
  return out;
}

std::vector<BoundReport> check_corollary_bounds(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                                const ModelFn& f, const LossSpec& loss,
                                                double tol) {
  if (!loss.is_metric())
    return {not_applicable(BoundId::RiskViaLabelEntanglement, "loss is not a metric"),
            not_applicable(BoundId::RiskViaPredictionEntanglement, "loss is not a metric")};
  EntanglementReport r = oracle_upper_bound(p, q, f, loss);
  std::vector<BoundReport> out;
  out.push_back(make_report(
      BoundId::RiskViaLabelEntanglement, r.target_risk, r.oub, tol,
      fmt("risk_p=%.6g w_out=%.6g e_label=%.6g", r.source_risk, r.marginal_output_w1,
          r.label_entanglement)));
  out.push_back(make_report(
      BoundId::RiskViaPredictionEntanglement, r.target_risk,
      r.source_risk + r.label_shift_w1 + r.prediction_entanglement, tol,
      fmt("risk_p=%.6g w_label=%.6g e_pred=%.6g", r.source_risk, r.label_shift_w1,
          r.prediction_entanglement)));
  return out;
}

std::vector<BoundReport> check_conversions(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                           const ModelFn& f, const LossSpec& loss, double tol) {
  if (!loss.is_metric())
    return {not_applicable(BoundId::ConvertLabelToPrediction, "loss is not a metric"),
            not_applicable(BoundId::ConvertPredictionToLabel, "loss is not a metric")};
  EntanglementReport r = oracle_upper_bound(p, q, f, loss);
  double risks = r.source_risk + r.target_risk;
  std::vector<BoundReport> out;
  out.push_back(make_report(BoundId::ConvertLabelToPrediction, r.label_entanglement,
                            r.prediction_entanglement + risks + r.label_shift_w1, tol,
                            fmt("risks=%.6g w_label=%.6g", risks, r.label_shift_w1)));
  out.push_back(make_report(BoundId::ConvertPredictionToLabel, r.prediction_entanglement,
                            r.label_entanglement + risks + r.marginal_output_w1, tol,
                            fmt("risks=%.6g w_out=%.6g", risks, r.marginal_output_w1)));
  return out;
}

std::vector<BoundReport> check_objective_equivalence(const EmpiricalJoint& p,
                                                     const EmpiricalJoint& q, const ModelFn& f,
                                                     const LossSpec& loss, double tol) {
  if (!loss.is_metric())
    return {not_applicable(BoundId::ObjectiveEquivalenceLower, "loss is not a metric"),
            not_applicable(BoundId::ObjectiveEquivalenceUpper, "loss is not a metric")};
  EntanglementReport r = oracle_upper_bound(p, q, f, loss);
  double label_objective = r.source_risk + r.label_shift_w1 + r.prediction_entanglement;
  std::vector<BoundReport> out;
  out.push_back(make_report(BoundId::ObjectiveEquivalenceLower, r.oub, 3.0 * label_objective, tol,
                            fmt("oub=%.6g label_objective=%.6g", r.oub, label_objective)));
  out.push_back(make_report(BoundId::ObjectiveEquivalenceUpper, label_objective, 3.0 * r.oub, tol,
                            fmt("oub=%.6g label_objective=%.6g", r.oub, label_objective)));
  return out;
}

BoundReport check_label_shift_lower(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                    const ModelFn& f, const LossSpec& loss, double tol) {
  EntanglementReport r = oracle_upper_bound(p, q, f, loss);
  return make_report(BoundId::LabelShiftLower, r.label_shift_w1, r.oub, tol,
                     fmt("w_label=%.6g oub=%.6g", r.label_shift_w1, r.oub));
}

BoundReport check_cc_to_lje(const EmpiricalJoint& p, const EmpiricalJoint& q, const ModelFn& f,
                            const LossSpec& loss, double tol) {
  if (!loss.is_metric()) return not_applicable(BoundId::CcToLje, "loss is not a metric");
  CcLevel cc = measured_cc_level(p, q, f, loss);
  if (!cc.ok) return not_applicable(BoundId::CcToLje, "no class present in both domains");
  double delta_hat = label_shift_w1(p, q, loss);
  double rq = risk(q, f, loss);
  double ratio = (loss.upper + loss.min_sep) / loss.min_sep;
  return make_report(BoundId::CcToLje, cc.source_risk + rq,
                     2.0 * cc.value + ratio * delta_hat, tol,
                     fmt("kappa_hat=%.6g delta_hat=%.6g ratio=%.6g", cc.value, delta_hat, ratio));
}

BoundReport check_not_cc(const EmpiricalJoint& p, const EmpiricalJoint& q, const ModelFn& f,
                         const LossSpec& loss, double kappa, double tol) {
  if (!loss.is_metric()) return not_applicable(BoundId::NotCc, "loss is not a metric");
  if (kappa < 0.0) throw ConfigError("check_not_cc: kappa must be non-negative");
  CcLevel cc = measured_cc_level(p, q, f, loss);
  if (!cc.ok) return not_applicable(BoundId::NotCc, "no class present in both domains");
  if (kappa > cc.value + tol)
    return not_applicable(BoundId::NotCc,
                          fmt("level %.6g above measured %.6g", kappa, cc.value));
  Vec pm = class_masses(p);
  Vec qm = class_masses(q);
  int y_min = 0, y_max = 0;
  for (int c = 1; c < q.num_classes(); ++c) {
    if (qm[c] < qm[y_min]) y_min = c;
    if (qm[c] > qm[y_max]) y_max = c;
  }
  // The mixed distribution r = p(x|y) q(y) needs a source conditional for
  // every target class that carries mass.
  for (int c = 0; c < q.num_classes(); ++c)
    if (qm[c] > 0.0 && pm[c] <= 0.0)
      return not_applicable(BoundId::NotCc, "target class mass without source support");
  double r_mixed = 0.0;  // risk under source conditionals reweighted to target label masses
  for (int i = 0; i < p.size(); ++i) {
    int y = p.labels()[i];
    if (p.weights()[i] <= 0.0 || qm[y] <= 0.0) continue;
    r_mixed += p.weights()[i] * (qm[y] / pm[y]) *
               loss(f(p.inputs()[i]), one_hot(y, p.num_classes()));
  }
  double rq = risk(q, f, loss);
  return make_report(BoundId::NotCc, kappa * qm[y_min],
                     cc.source_risk * qm[y_max] + rq + r_mixed, tol,
                     fmt("kappa=%.6g qmin=%.6g qmax=%.6g", kappa, qm[y_min], qm[y_max]));
}

BoundReport check_cc_oub_tightness(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                   const ModelFn& f, const LossSpec& loss, double tol) {
  if (!loss.is_metric()) return not_applicable(BoundId::CcOubTightness, "loss is not a metric");
  CcLevel cc = measured_cc_level(p, q, f, loss);
  if (!cc.ok) return not_applicable(BoundId::CcOubTightness, "no class present in both domains");
  double delta_hat = label_shift_w1(p, q, loss);
  double ratio = (loss.upper + loss.min_sep) / loss.min_sep;
  EntanglementReport r = oracle_upper_bound(p, q, f, loss);
  return make_report(BoundId::CcOubTightness, r.oub, 3.0 * (cc.value + ratio * delta_hat), tol,
                     fmt("kappa_hat=%.6g delta_hat=%.6g oub=%.6g", cc.value, delta_hat, r.oub));
}

BoundReport check_gs_implies_cc(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                const std::vector<EmpiricalJoint>& chain, const ModelFn& f,
                                const LossSpec& loss, const AssumptionParams& params,
                                double tol) {
  params.validate();
  if (!loss.is_metric()) return not_applicable(BoundId::GsImpliesCc, "loss is not a metric");
  if (chain.empty()) return not_applicable(BoundId::GsImpliesCc, "no chain provided");
  if (static_cast<int>(chain.size()) != params.s)
    return not_applicable(BoundId::GsImpliesCc, "stage count disagrees with params");
  double link = max_output_link(p, chain, f, loss);
  if (link >= params.epsilon)
    throw ChainViolation(fmt("gradual chain link %.6g breaches budget %.6g", link, params.epsilon));
  double rp = risk(p, f, loss);
  if (rp >= params.b)
    return not_applicable(BoundId::GsImpliesCc, fmt("source risk %.6g above budget %.6g", rp, params.b));
  CcLevel cc = measured_cc_level(p, q, f, loss);
  if (!cc.ok) return not_applicable(BoundId::GsImpliesCc, "no class present in both domains");
  double rhs = params.b + params.epsilon * (params.a / 2.0) * params.s * (params.s + 1);
  return make_report(BoundId::GsImpliesCc, cc.value, rhs, tol,
                     fmt("kappa_hat=%.6g max_link=%.6g risk_p=%.6g", cc.value, link, rp));
}

BoundReport check_gs_entanglement_cap(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                      const std::vector<EmpiricalJoint>& chain, const ModelFn& f,
                                      const LossSpec& loss, const AssumptionParams& params,
                                      double tol) {
  params.validate();
  if (!loss.is_metric()) return not_applicable(BoundId::GsEntanglementCap, "loss is not a metric");
  if (chain.empty()) return not_applicable(BoundId::GsEntanglementCap, "no chain provided");
  if (static_cast<int>(chain.size()) != params.s)
    return not_applicable(BoundId::GsEntanglementCap, "stage count disagrees with params");
  double link = max_output_link(p, chain, f, loss);
  if (link >= params.epsilon)
    return not_applicable(BoundId::GsEntanglementCap,
                          fmt("link %.6g breaches budget %.6g (shift is not gradual for f)", link,
                              params.epsilon));
  double rp = risk(p, f, loss);
  if (rp >= params.b)
    return not_applicable(BoundId::GsEntanglementCap,
                          fmt("source risk %.6g above budget %.6g", rp, params.b));
  double delta_hat = label_shift_w1(p, q, loss);
  double e_label = label_entanglement(p, q, f, loss);
  double ratio = (loss.upper + loss.min_sep) / loss.min_sep;
  double rhs = 2.0 * params.b + params.epsilon * params.a * params.s * (params.s + 1) +
               2.0 * delta_hat * ratio;
  return make_report(BoundId::GsEntanglementCap, e_label, rhs, tol,
                     fmt("e_label=%.6g delta_hat=%.6g max_link=%.6g", e_label, delta_hat, link));
}

std::vector<BoundReport> check_kappa_variants(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                              const ModelFn& f, const LossSpec& loss,
                                              double tol) {
  const double k = loss.triangle_factor;
  if (k < 1.0)
    return {not_applicable(BoundId::KappaVariantOutput, "triangle factor below 1"),
            not_applicable(BoundId::KappaVariantLabel, "triangle factor below 1")};
  EntanglementReport r = oracle_upper_bound(p, q, f, loss);
  std::vector<BoundReport> out;
  out.push_back(make_report(
      BoundId::KappaVariantOutput, r.target_risk,
      k * k * r.source_risk + k * r.marginal_output_w1 + k * k * r.label_entanglement, tol,
      fmt("varkappa=%.6g risk_p=%.6g", k, r.source_risk)));
  out.push_back(make_report(
      BoundId::KappaVariantLabel, r.target_risk,
      k * k * r.source_risk + k * k * r.label_shift_w1 + k * r.prediction_entanglement, tol,
      fmt("varkappa=%.6g risk_p=%.6g", k, r.source_risk)));
  return out;
}

std::vector<BoundReport> check_kl_corollary(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                            const ModelFn& f, const LossSpec& loss,
                                            int bins_per_axis, double tol) {
  if (!loss.is_metric())
    return {not_applicable(BoundId::KlOutput, "loss is not a metric"),
            not_applicable(BoundId::KlLabel, "loss is not a metric")};
  if (bins_per_axis < 1) throw ConfigError("check_kl_corollary: bins_per_axis must be positive");
  EntanglementReport r = oracle_upper_bound(p, q, f, loss);

  auto hp = output_histogram(pushforward(p, f), bins_per_axis);
  auto hq = output_histogram(pushforward(q, f), bins_per_axis);
  double kl_out = std::min(kl_divergence(hp, hq), kl_divergence(hq, hp));
  double w_term_out = loss.upper * std::sqrt(kl_out / 2.0);

  double kl_lab = std::min(kl_discrete(class_masses(p), class_masses(q)),
                           kl_discrete(class_masses(q), class_masses(p)));
  double w_term_lab = loss.upper * std::sqrt(kl_lab / 2.0);

  std::vector<BoundReport> out;
  out.push_back(make_report(BoundId::KlOutput, r.target_risk,
                            r.source_risk + w_term_out + r.label_entanglement, tol,
                            kl_out == kInf ? "kl=inf (disjoint histogram support)"
                                           : fmt("kl=%.6g bins=%.6g", kl_out, double(bins_per_axis))));
  out.push_back(make_report(BoundId::KlLabel, r.target_risk,
                            r.source_risk + w_term_lab + r.prediction_entanglement, tol,
                            kl_lab == kInf ? "kl=inf (disjoint class support)"
                                           : fmt("kl=%.6g", kl_lab)));
  return out;
}

BoundReport gaussian_decomposition_report(const DecompositionCheck& check) {
  BoundReport r;
  r.id = BoundId::GaussianScaledDecomposition;
  r.lhs = std::fabs(check.joint - check.rhs);
  r.rhs = check.tolerance;
  r.slack = r.rhs - r.lhs;
  r.passed = check.passed;
  r.context = fmt("joint=%.6g split=%.6g mc_se=%.6g", check.joint, check.rhs,
                  check.mc_std_error);
  return r;
}

std::vector<BoundReport> run_bound_suite(const EmpiricalJoint& p, const EmpiricalJoint& q,
                                         const std::vector<EmpiricalJoint>& chain,
                                         const ModelFn& f, const LossSpec& loss,
                                         const AssumptionParams& params, double tol,
                                         int bins_per_axis) {
  std::vector<BoundReport> out;
  auto append = [&out](std::vector<BoundReport> rows) {
    for (BoundReport& r : rows) out.push_back(std::move(r));
  };
  append(check_lemma1_chain(p, q, f, loss, tol));
  append(check_corollary_bounds(p, q, f, loss, tol));
  append(check_conversions(p, q, f, loss, tol));
  append(check_objective_equivalence(p, q, f, loss, tol));
  out.push_back(check_label_shift_lower(p, q, f, loss, tol));
  out.push_back(check_cc_to_lje(p, q, f, loss, tol));
  out.push_back(check_not_cc(p, q, f, loss, params.kappa, tol));
  out.push_back(check_cc_oub_tightness(p, q, f, loss, tol));
  if (chain.empty()) {
    out.push_back(not_applicable(BoundId::GsImpliesCc, "no chain provided"));
    out.push_back(not_applicable(BoundId::GsEntanglementCap, "no chain provided"));
  } else {
    try {
      out.push_back(check_gs_implies_cc(p, q, chain, f, loss, params, tol));
    } catch (const ChainViolation& e) {
      out.push_back(not_applicable(BoundId::GsImpliesCc, e.what()));
    }
    out.push_back(check_gs_entanglement_cap(p, q, chain, f, loss, params, tol));
  }
  append(check_kappa_variants(p, q, f, loss, tol));
  append(check_kl_corollary(p, q, f, loss, bins_per_axis, tol));
  return out;
}

std::string bound_reports_csv(const std::vector<BoundReport>& reports) {
  std::string out = "bound_id,lhs,rhs,slack,passed,context\n";
  char buf[256];
  for (const BoundReport& r : reports) {
    std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%.12g,%s,", to_string(r.id), r.lhs, r.rhs,
                  r.slack, r.passed ? "true" : "false");
    out += buf;
    out += r.context;
    out += '\n';
  }
  return out;
}

}  // namespace entot
