#include "entot/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "entot/entangle.hpp"
#include "entot/loss.hpp"

namespace entot {

namespace {

int linear_weight_count(int d, int c) { return c * d + c; }
int mlp_weight_count(int d, int c, int h) { return h * d + h + c * h + c; }

double activate(Activation a, double v) {
  return a == Activation::Relu ? std::max(0.0, v) : std::tanh(v);
}

double activate_slope(Activation a, double pre) {
  if (a == Activation::Relu) return pre > 0.0 ? 1.0 : 0.0;
  double t = std::tanh(pre);
  return 1.0 - t * t;
}

struct ForwardCache {
  Vec pre;     // mlp pre-activations
  Vec h;       // mlp post-activations
  Vec logits;  // head inputs to softmax
  Vec probs;
};

Vec softmax_of(const Vec& z) {
  double mx = *std::max_element(z.begin(), z.end());
  Vec p(z.size());
  double sum = 0.0;
  for (size_t k = 0; k < z.size(); ++k) {
    p[k] = std::exp(z[k] - mx);
    sum += p[k];
  }
  for (double& v : p) v /= sum;
  return p;
}

// Stable -log softmax(z)[y].
double negative_log_prob(const Vec& z, int y) {
  double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - mx);
  return mx + std::log(sum) - z[y];
}

ForwardCache forward(const Model& m, const Vec& x) {
  ForwardCache c;
  const Vec& p = m.parameters();
  const int d = m.input_dim();
  const int nc = m.num_classes();
  if (m.kind() == ModelKind::LinearSoftmax) {
    c.logits.resize(nc);
    for (int k = 0; k < nc; ++k) {
      double z = p[static_cast<size_t>(nc) * d + k];
      for (int j = 0; j < d; ++j) z += p[static_cast<size_t>(k) * d + j] * x[j];
      c.logits[k] = z;
    }
  } else {
    const int h = m.hidden_units();
    const int ob1 = h * d, ow2 = h * d + h, ob2 = h * d + h + nc * h;
    c.pre.resize(h);
    c.h.resize(h);
    for (int k = 0; k < h; ++k) {
      double z = p[ob1 + k];
      for (int j = 0; j < d; ++j) z += p[static_cast<size_t>(k) * d + j] * x[j];
      c.pre[k] = z;
      c.h[k] = activate(m.activation(), z);
    }
    c.logits.resize(nc);
    for (int k = 0; k < nc; ++k) {
      double z = p[ob2 + k];
      for (int j = 0; j < h; ++j) z += p[ow2 + static_cast<size_t>(k) * h + j] * c.h[j];
      c.logits[k] = z;
    }
  }
  c.probs = softmax_of(c.logits);
  return c;
}

// Pulls a gradient in probability space back through softmax:
// dz_k = p_k (dp_k - <dp, p>).
Vec softmax_pullback(const Vec& probs, const Vec& dp) {
  double inner = 0.0;
  for (size_t k = 0; k < probs.size(); ++k) inner += dp[k] * probs[k];
  Vec dz(probs.size());
  for (size_t k = 0; k < probs.size(); ++k) dz[k] = probs[k] * (dp[k] - inner);
  return dz;
}

// Accumulates parameter gradients for one sample. dz is the gradient at the
// logits (may be empty for a feature-only pull); dh_extra adds directly to
// the hidden-feature gradient (mlp only).
void backward(const Model& m, const Vec& x, const ForwardCache& c, const Vec& dz,
              const Vec* dh_extra, Vec& g) {
  const int d = m.input_dim();
  const int nc = m.num_classes();
  const Vec& p = m.parameters();
  if (m.kind() == ModelKind::LinearSoftmax) {
    for (int k = 0; k < nc; ++k) {
      if (dz[k] == 0.0) continue;
      for (int j = 0; j < d; ++j) g[static_cast<size_t>(k) * d + j] += dz[k] * x[j];
      g[static_cast<size_t>(nc) * d + k] += dz[k];
    }
    return;
  }
  const int h = m.hidden_units();
  const int ob1 = h * d, ow2 = h * d + h, ob2 = h * d + h + nc * h;
  Vec dh(h, 0.0);
  if (!dz.empty()) {
    for (int k = 0; k < nc; ++k) {
      if (dz[k] == 0.0) continue;
      for (int j = 0; j < h; ++j) {
        g[ow2 + static_cast<size_t>(k) * h + j] += dz[k] * c.h[j];
        dh[j] += dz[k] * p[ow2 + static_cast<size_t>(k) * h + j];
      }
      g[ob2 + k] += dz[k];
    }
  }
  if (dh_extra)
    for (int j = 0; j < h; ++j) dh[j] += (*dh_extra)[j];
  for (int k = 0; k < h; ++k) {
    double dpre = dh[k] * activate_slope(m.activation(), c.pre[k]);
    if (dpre == 0.0) continue;
    for (int j = 0; j < d; ++j) g[static_cast<size_t>(k) * d + j] += dpre * x[j];
    g[ob1 + k] += dpre;
  }
}

std::vector<ForwardCache> forward_all(const Model& m, const EmpiricalJoint& batch) {
  std::vector<ForwardCache> out;
  out.reserve(batch.size());
  for (const Vec& x : batch.inputs()) out.push_back(forward(m, x));
  return out;
}

double sample_loss(TrainLoss kind, const ForwardCache& c, int label, int num_classes) {
  if (kind == TrainLoss::CrossEntropy) return negative_log_prob(c.logits, label);
  double s = 0.0;
  for (int k = 0; k < num_classes; ++k) {
    double d = c.probs[k] - (k == label ? 1.0 : 0.0);
    s += d * d;
  }
  return std::sqrt(s);
}

// Gradient of sample_loss at the logits, scaled by weight.
Vec sample_loss_pullback(TrainLoss kind, const ForwardCache& c, int label, int num_classes,
                         double weight) {
  if (kind == TrainLoss::CrossEntropy) {
    Vec dz(c.probs);
    dz[label] -= 1.0;
    for (double& v : dz) v *= weight;
    return dz;
  }
  Vec diff(num_classes);
  double norm = 0.0;
  for (int k = 0; k < num_classes; ++k) {
    diff[k] = c.probs[k] - (k == label ? 1.0 : 0.0);
    norm += diff[k] * diff[k];
  }
  norm = std::sqrt(norm);
  if (norm <= 1e-12) return Vec(num_classes, 0.0);  // loss kink; zero subgradient
  for (double& v : diff) v *= weight / norm;
  return softmax_pullback(c.probs, diff);
}

enum class Slot { Marginal, Feature, ClassMax };

struct PlanTerm {
  Slot slot = Slot::Marginal;
  double weight = 1.0;
  std::vector<int> rows, cols;  // atom indices into the two batches
  std::vector<double> plan;     // row-major rows.size() x cols.size()
};

struct Frozen {
  std::vector<PlanTerm> terms;
  int active_class = -1;
};

const Vec& term_point(const ForwardCache& c, Slot slot) {
  return slot == Slot::Feature ? c.h : c.probs;
}

double pair_distance(const ForwardCache& a, const ForwardCache& b, Slot slot) {
  const Vec& u = term_point(a, slot);
  const Vec& v = term_point(b, slot);
  double s = 0.0;
  for (size_t k = 0; k < u.size(); ++k) {
    double d = u[k] - v[k];
    s += d * d;
  }
  return std::sqrt(s);
}

// Solves the transport problem between the listed atoms at the current
// forward state and freezes the plan.
PlanTerm solve_term(Slot slot, double weight, std::vector<int> rows, std::vector<int> cols,
                    const Vec& wa, const Vec& wb, const std::vector<ForwardCache>& cp,
                    const std::vector<ForwardCache>& cq, const TrainConfig& cfg) {
  CostMatrix cost;
  cost.n = static_cast<int>(rows.size());
  cost.m = static_cast<int>(cols.size());
  cost.entries.resize(static_cast<size_t>(cost.n) * cost.m);
  for (int i = 0; i < cost.n; ++i)
    for (int j = 0; j < cost.m; ++j) {
      double d = pair_distance(cp[rows[i]], cq[cols[j]], slot);
      cost.entries[static_cast<size_t>(i) * cost.m + j] = cfg.wasserstein_order == 2 ? d * d : d;
    }
  Coupling coupling = solve(wa, wb, cost, cfg.ot_method);
  PlanTerm t;
  t.slot = slot;
  t.weight = weight;
  t.rows = std::move(rows);
  t.cols = std::move(cols);
  t.plan = std::move(coupling.plan);
  return t;
}

// Plan-frozen transport value of one term at the current forward state.
double term_value(const PlanTerm& t, const std::vector<ForwardCache>& cp,
                  const std::vector<ForwardCache>& cq, int alpha) {
  double s = 0.0;
  const size_t m = t.cols.size();
  for (size_t i = 0; i < t.rows.size(); ++i)
    for (size_t j = 0; j < m; ++j) {
      double g = t.plan[i * m + j];
      if (g <= 0.0) continue;
      double d = pair_distance(cp[t.rows[i]], cq[t.cols[j]], t.slot);
      s += g * (alpha == 2 ? d * d : d);
    }
  return alpha == 2 ? std::sqrt(std::max(s, 0.0)) : s;
}

std::vector<int> all_indices(int n) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

Frozen freeze(const Model& model, const EmpiricalJoint& bp, const EmpiricalJoint& bq,
              const TrainConfig& cfg, const std::vector<ForwardCache>& cp,
              const std::vector<ForwardCache>& cq) {
  Frozen fr;
  const Objective obj = cfg.objective;
  if (obj == Objective::Erm || obj == Objective::LjeOracle) return fr;

  if (obj == Objective::Wrr || obj == Objective::JdotLite) {
    fr.terms.push_back(solve_term(Slot::Marginal, cfg.wrr_weight, all_indices(bp.size()),
                                  all_indices(bq.size()), bp.weights(), bq.weights(), cp, cq,
                                  cfg));
    if (obj == Objective::JdotLite) {
      if (model.kind() != ModelKind::MlpOneHidden)
        throw FeatureTermUnavailable(
            "jdot_lite needs hidden features; the linear model has none");
      fr.terms.push_back(solve_term(Slot::Feature, cfg.feature_weight, all_indices(bp.size()),
                                    all_indices(bq.size()), bp.weights(), bq.weights(), cp, cq,
                                    cfg));
    }
    return fr;
  }

  // cc_oracle: solve every class, keep the largest (lowest index on ties).
  double best = -1.0;
  for (int c = 0; c < bp.num_classes(); ++c) {
    std::vector<int> rows, cols;
    double mass_p = 0.0, mass_q = 0.0;
    for (int i = 0; i < bp.size(); ++i)
      if (bp.labels()[i] == c && bp.weights()[i] > 0.0) {
        rows.push_back(i);
        mass_p += bp.weights()[i];
      }
    for (int j = 0; j < bq.size(); ++j)
      if (bq.labels()[j] == c && bq.weights()[j] > 0.0) {
        cols.push_back(j);
        mass_q += bq.weights()[j];
      }
    if (rows.empty() || cols.empty())
      throw MissingClass("cc_oracle: class " + std::to_string(c) +
                         " absent from a batch; resample or balance batches");
    Vec wa, wb;
    wa.reserve(rows.size());
    wb.reserve(cols.size());
    for (int i : rows) wa.push_back(bp.weights()[i] / mass_p);
    for (int j : cols) wb.push_back(bq.weights()[j] / mass_q);
    PlanTerm t = solve_term(Slot::ClassMax, 1.0, std::move(rows), std::move(cols), wa, wb, cp,
                            cq, cfg);
    double w = term_value(t, cp, cq, cfg.wasserstein_order);
    if (w > best) {
      best = w;
      fr.active_class = c;
      if (fr.terms.empty())
        fr.terms.push_back(std::move(t));
      else
        fr.terms[0] = std::move(t);
    }
  }
  return fr;
}

ObjectiveTerms frozen_value(const EmpiricalJoint& bp, const EmpiricalJoint& bq,
                            const TrainConfig& cfg, const std::vector<ForwardCache>& cp,
                            const std::vector<ForwardCache>& cq, const Frozen& fr) {
  ObjectiveTerms out;
  for (int i = 0; i < bp.size(); ++i)
    out.risk_p += bp.weights()[i] * sample_loss(cfg.loss, cp[i], bp.labels()[i],
                                                bp.num_classes());
  out.value = out.risk_p;
  if (cfg.objective == Objective::LjeOracle) {
    for (int j = 0; j < bq.size(); ++j)
      out.risk_q += bq.weights()[j] * sample_loss(cfg.loss, cq[j], bq.labels()[j],
                                                  bq.num_classes());
    out.value += out.risk_q;
  }
  for (const PlanTerm& t : fr.terms) {
    double w = term_value(t, cp, cq, cfg.wasserstein_order);
    out.value += t.weight * w;
    switch (t.slot) {
      case Slot::Marginal: out.w_marginal = w; break;
      case Slot::Feature: out.w_feature = w; break;
      case Slot::ClassMax: out.w_class_max = w; break;
    }
  }
  out.active_class = fr.active_class;
  return out;
}

Vec frozen_gradient(const Model& model, const EmpiricalJoint& bp, const EmpiricalJoint& bq,
                    const TrainConfig& cfg, const std::vector<ForwardCache>& cp,
                    const std::vector<ForwardCache>& cq, const Frozen& fr) {
  Vec g(model.parameter_count(), 0.0);
  for (int i = 0; i < bp.size(); ++i) {
    if (bp.weights()[i] <= 0.0) continue;
    Vec dz = sample_loss_pullback(cfg.loss, cp[i], bp.labels()[i], bp.num_classes(),
                                  bp.weights()[i]);
    backward(model, bp.inputs()[i], cp[i], dz, nullptr, g);
  }
  if (cfg.objective == Objective::LjeOracle) {
    for (int j = 0; j < bq.size(); ++j) {
      if (bq.weights()[j] <= 0.0) continue;
      Vec dz = sample_loss_pullback(cfg.loss, cq[j], bq.labels()[j], bq.num_classes(),
                                    bq.weights()[j]);
      backward(model, bq.inputs()[j], cq[j], dz, nullptr, g);
    }
  }

  const int alpha = cfg.wasserstein_order;
  for (const PlanTerm& t : fr.terms) {
    // d(weight * S^{1/alpha})/dtheta with the plan fixed; S is the powered
    // transport sum. alpha=1: sum of gamma * unit-direction terms. alpha=2:
    // (1/W) * sum of gamma * difference terms.
    double outer = t.weight;
    if (alpha == 2) {
      double w = term_value(t, cp, cq, alpha);
      if (w <= 1e-9) continue;  // surrogate kink at zero distance
      outer /= w;
    }
    const size_t m = t.cols.size();
    const size_t pt_dim = term_point(cp[t.rows[0]], t.slot).size();
    std::vector<Vec> du(t.rows.size(), Vec(pt_dim, 0.0));
    std::vector<Vec> dv(t.cols.size(), Vec(pt_dim, 0.0));
    for (size_t i = 0; i < t.rows.size(); ++i) {
      const Vec& u = term_point(cp[t.rows[i]], t.slot);
      for (size_t j = 0; j < m; ++j) {
        double gamma = t.plan[i * m + j];
        if (gamma <= 0.0) continue;
        const Vec& v = term_point(cq[t.cols[j]], t.slot);
        double dist = 0.0;
        for (size_t k = 0; k < pt_dim; ++k) {
          double d = u[k] - v[k];
          dist += d * d;
        }
        dist = std::sqrt(dist);
        double coef;
        if (alpha == 1) {
          if (dist <= 1e-12) continue;  // norm kink; zero subgradient
          coef = outer * gamma / dist;
        } else {
          coef = outer * gamma;
        }
        for (size_t k = 0; k < pt_dim; ++k) {
          double d = coef * (u[k] - v[k]);
          du[i][k] += d;
          dv[j][k] -= d;
        }
      }
    }
    const Vec no_dz;
    for (size_t i = 0; i < t.rows.size(); ++i) {
      int idx = t.rows[i];
      if (t.slot == Slot::Feature) {
        backward(model, bp.inputs()[idx], cp[idx], no_dz, &du[i], g);
      } else {
        Vec dz = softmax_pullback(cp[idx].probs, du[i]);
        backward(model, bp.inputs()[idx], cp[idx], dz, nullptr, g);
      }
    }
    for (size_t j = 0; j < t.cols.size(); ++j) {
      int idx = t.cols[j];
      if (t.slot == Slot::Feature) {
        backward(model, bq.inputs()[idx], cq[idx], no_dz, &dv[j], g);
      } else {
        Vec dz = softmax_pullback(cq[idx].probs, dv[j]);
        backward(model, bq.inputs()[idx], cq[idx], dz, nullptr, g);
      }
    }
  }
  return g;
}

void check_batches(const EmpiricalJoint& bp, const EmpiricalJoint& bq) {
  if (bp.size() == 0 || bq.size() == 0)
    throw ConfigError("objective needs non-empty batches");
  if (bp.num_classes() != bq.num_classes())
    throw DimensionMismatch("batches disagree on the number of classes");
}

Vec cumulative(const Vec& w) {
  Vec c(w.size());
  double s = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    s += std::max(w[i], 0.0);
    c[i] = s;
  }
  return c;
}

int pick(const Vec& cum, Rng& rng) {
  double u = rng.next_unit() * cum.back();
  auto it = std::lower_bound(cum.begin(), cum.end(), u);
  int i = static_cast<int>(it - cum.begin());
  return std::min(i, static_cast<int>(cum.size()) - 1);
}

EmpiricalJoint gather(const EmpiricalJoint& data, const std::vector<int>& idx) {
  std::vector<Vec> pts;
  std::vector<int> labels;
  pts.reserve(idx.size());
  labels.reserve(idx.size());
  for (int i : idx) {
    pts.push_back(data.inputs()[i]);
    labels.push_back(data.labels()[i]);
  }
  Vec w(idx.size(), 1.0 / static_cast<double>(idx.size()));
  return EmpiricalJoint(std::move(pts), std::move(labels), std::move(w), data.num_classes());
}

bool covers_all_classes(const EmpiricalJoint& data, const std::vector<int>& idx, int classes) {
  std::vector<char> seen(classes, 0);
  int left = classes;
  for (int i : idx)
    if (!seen[data.labels()[i]]) {
      seen[data.labels()[i]] = 1;
      if (--left == 0) return true;
    }
  return false;
}

}  // namespace

Model::Model(ModelKind kind, int input_dim, int num_classes, int hidden_units,
             Activation activation)
    : kind_(kind),
      input_dim_(input_dim),
      num_classes_(num_classes),
      hidden_(kind == ModelKind::LinearSoftmax ? 0 : hidden_units),
      activation_(activation) {
  if (input_dim < 1) throw ConfigError("model needs a positive input dimension");
  if (num_classes < 2) throw ConfigError("model needs at least two classes");
  if (kind == ModelKind::MlpOneHidden && hidden_units < 1)
    throw ConfigError("mlp model needs at least one hidden unit");
  params_.assign(parameter_count(), 0.0);
}

int Model::parameter_count() const {
  return kind_ == ModelKind::LinearSoftmax
             ? linear_weight_count(input_dim_, num_classes_)
             : mlp_weight_count(input_dim_, num_classes_, hidden_);
}

void Model::init_params(Rng& rng) {
  auto fill = [&rng](double* p, int count, int fan_in) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (int i = 0; i < count; ++i) p[i] = rng.next_uniform(-bound, bound);
  };
  if (kind_ == ModelKind::LinearSoftmax) {
    fill(params_.data(), parameter_count(), input_dim_);
    return;
  }
  int first = hidden_ * input_dim_ + hidden_;
  fill(params_.data(), first, input_dim_);
  fill(params_.data() + first, parameter_count() - first, hidden_);
}

Vec Model::logits(const Vec& x) const { return forward(*this, x).logits; }

Vec Model::operator()(const Vec& x) const { return forward(*this, x).probs; }

Vec Model::hidden(const Vec& x) const {
  if (kind_ == ModelKind::LinearSoftmax)
    throw FeatureTermUnavailable("the linear model exposes no hidden features");
  return forward(*this, x).h;
}

ModelFn Model::fn() const {
  Model snapshot = *this;
  return [snapshot](const Vec& x) { return snapshot(x); };
}

void Model::set_parameters(const Vec& p) {
  if (static_cast<int>(p.size()) != parameter_count())
    throw DimensionMismatch("parameter vector size does not match the model layout");
  for (double v : p)
    if (!std::isfinite(v)) throw ConfigError("model parameters must be finite");
  params_ = p;
}

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("train: lr must be positive");
  if (epochs < 1) throw ConfigError("train: epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("train: batch_size must be at least 1");
  if (wasserstein_order != 1 && wasserstein_order != 2)
    throw ConfigError("train: wasserstein_order must be 1 or 2");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw ConfigError("train: adam betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("train: adam epsilon must be positive");
  if (feature_weight < 0.0) throw ConfigError("train: feature_weight must be non-negative");
  if (wrr_weight < 0.0) throw ConfigError("train: wrr_weight must be non-negative");
  if (model == ModelKind::MlpOneHidden && hidden_units < 1)
    throw ConfigError("train: hidden_units must be at least 1 for the mlp model");
}

ObjectiveTerms objective_value(const Model& model, const EmpiricalJoint& batch_p,
                               const EmpiricalJoint& batch_q, const TrainConfig& config) {
  config.validate();
  check_batches(batch_p, batch_q);
  auto cp = forward_all(model, batch_p);
  auto cq = forward_all(model, batch_q);
  Frozen fr = freeze(model, batch_p, batch_q, config, cp, cq);
  return frozen_value(batch_p, batch_q, config, cp, cq, fr);
}

Vec gradient(const Model& model, const EmpiricalJoint& batch_p, const EmpiricalJoint& batch_q,
             const TrainConfig& config) {
  config.validate();
  check_batches(batch_p, batch_q);
  auto cp = forward_all(model, batch_p);
  auto cq = forward_all(model, batch_q);
  Frozen fr = freeze(model, batch_p, batch_q, config, cp, cq);
  return frozen_gradient(model, batch_p, batch_q, config, cp, cq, fr);
}

double plan_frozen_objective(const Model& model, const Model& anchor,
                             const EmpiricalJoint& batch_p, const EmpiricalJoint& batch_q,
                             const TrainConfig& config) {
  config.validate();
  check_batches(batch_p, batch_q);
  auto ap = forward_all(anchor, batch_p);
  auto aq = forward_all(anchor, batch_q);
  Frozen fr = freeze(anchor, batch_p, batch_q, config, ap, aq);
  auto cp = forward_all(model, batch_p);
  auto cq = forward_all(model, batch_q);
  return frozen_value(batch_p, batch_q, config, cp, cq, fr).value;
}

double accuracy(const EmpiricalJoint& joint, const Model& model) {
  double hit = 0.0;
  for (int i = 0; i < joint.size(); ++i) {
    Vec z = model.logits(joint.inputs()[i]);
    int arg = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
    if (arg == joint.labels()[i]) hit += joint.weights()[i];
  }
  return hit;
}

FitResult fit(const EmpiricalJoint& source, const EmpiricalJoint& target,
              const TrainConfig& config) {
  config.validate();
  check_batches(source, target);
  if (source.dim() != target.dim())
    throw DimensionMismatch("source and target input dimensions differ");
  const int classes = source.num_classes();
  if (config.class_balanced_sampling && config.batch_size < classes)
    throw ConfigError("train: class-balanced batches need batch_size >= num_classes");

  Rng root(config.seed);
  Model model(config.model, source.dim(), classes, config.hidden_units, config.activation);
  Rng init_rng = root.child(1);
  model.init_params(init_rng);
  Rng sample_rng = root.child(2);

  Vec cum_p = cumulative(source.weights());
  Vec cum_q = cumulative(target.weights());
  std::vector<std::vector<int>> by_class_p(classes), by_class_q(classes);
  std::vector<Vec> cum_class_p(classes), cum_class_q(classes);
  if (config.class_balanced_sampling) {
    for (int i = 0; i < source.size(); ++i)
      if (source.weights()[i] > 0.0) by_class_p[source.labels()[i]].push_back(i);
    for (int j = 0; j < target.size(); ++j)
      if (target.weights()[j] > 0.0) by_class_q[target.labels()[j]].push_back(j);
    for (int c = 0; c < classes; ++c) {
      if (by_class_p[c].empty() || by_class_q[c].empty())
        throw MissingClass("class-balanced sampling: class " + std::to_string(c) +
                           " carries no mass in one domain");
      Vec wp, wq;
      for (int i : by_class_p[c]) wp.push_back(source.weights()[i]);
      for (int j : by_class_q[c]) wq.push_back(target.weights()[j]);
      cum_class_p[c] = cumulative(wp);
      cum_class_q[c] = cumulative(wq);
    }
  }

  const int per_class = config.class_balanced_sampling ? config.batch_size / classes : 0;
  const int batch = config.class_balanced_sampling ? per_class * classes : config.batch_size;
  const int steps = std::max(1, source.size() / batch);

  auto draw = [&](const Vec& cum, const std::vector<std::vector<int>>& by_class,
                  const std::vector<Vec>& cum_class) {
    std::vector<int> idx;
    idx.reserve(batch);
    if (config.class_balanced_sampling) {
      for (int c = 0; c < classes; ++c)
        for (int k = 0; k < per_class; ++k)
          idx.push_back(by_class[c][pick(cum_class[c], sample_rng)]);
    } else {
      for (int k = 0; k < batch; ++k) idx.push_back(pick(cum, sample_rng));
    }
    return idx;
  };

  Vec m_state(model.parameter_count(), 0.0), v_state(model.parameter_count(), 0.0);
  long step_count = 0;
  std::vector<HistoryRow> history;
  const LossSpec metric = LossSpec::euclidean();

  // Parameters at the most recent finite objective evaluation; what the
  // divergence exception hands back.
  Vec last_ok = model.parameters();
  auto diverge = [&](const std::string& why) {
    Model snapshot = model;
    snapshot.set_parameters(last_ok);
    throw DivergedWithState("training diverged: " + why,
                            FitResult{std::move(snapshot), history});
  };

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (int step = 0; step < steps; ++step) {
      std::vector<int> ip, iq;
      int tries = 0;
      for (;;) {
        ip = draw(cum_p, by_class_p, cum_class_p);
        iq = draw(cum_q, by_class_q, cum_class_q);
        if (config.objective != Objective::CcOracle || config.class_balanced_sampling ||
            (covers_all_classes(source, ip, classes) && covers_all_classes(target, iq, classes)))
          break;
        if (++tries >= 64)
          throw MissingClass(
              "cc_oracle: a class stayed absent after 64 batch redraws; enable class-balanced "
              "sampling or enlarge the batch");
      }
      EmpiricalJoint bp = gather(source, ip);
      EmpiricalJoint bq = gather(target, iq);
      auto cp = forward_all(model, bp);
      auto cq = forward_all(model, bq);
      Frozen fr = freeze(model, bp, bq, config, cp, cq);
      ObjectiveTerms val = frozen_value(bp, bq, config, cp, cq, fr);
      if (!std::isfinite(val.value)) diverge("objective is non-finite");
      last_ok = model.parameters();
      Vec g = frozen_gradient(model, bp, bq, config, cp, cq, fr);

      Vec params = model.parameters();
      ++step_count;
      if (config.optimizer == OptimizerKind::Sgd) {
        for (size_t k = 0; k < params.size(); ++k) params[k] -= config.lr * g[k];
      } else {
        double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step_count));
        double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step_count));
        for (size_t k = 0; k < params.size(); ++k) {
          m_state[k] = config.beta1 * m_state[k] + (1.0 - config.beta1) * g[k];
          v_state[k] = config.beta2 * v_state[k] + (1.0 - config.beta2) * g[k] * g[k];
          params[k] -= config.lr * (m_state[k] / bc1) /
                       (std::sqrt(v_state[k] / bc2) + config.adam_eps);
        }
      }
      for (double v : params)
        if (!std::isfinite(v)) diverge("parameters are non-finite");
      model.set_parameters(params);
    }

    ModelFn f = model.fn();
    HistoryRow row;
    row.epoch = epoch;
    row.src_acc = accuracy(source, model);
    row.tgt_acc = accuracy(target, model);
    row.risk_p = risk(source, f, metric);
    row.risk_q = risk(target, f, metric);
    row.w_marginal = marginal_output_w1(source, target, f, metric);
    row.entangle_y = label_entanglement(source, target, f, metric);
    {
      auto cp = forward_all(model, source);
      auto cq = forward_all(model, target);
      Frozen fr = freeze(model, source, target, config, cp, cq);
      row.objective = frozen_value(source, target, config, cp, cq, fr).value;
    }
    if (!std::isfinite(row.objective)) diverge("epoch objective is non-finite");
    history.push_back(row);
  }
  return FitResult{std::move(model), std::move(history)};
}

std::string history_csv(const std::vector<HistoryRow>& rows) {
  std::string out = "epoch,src_acc,tgt_acc,risk_p,risk_q,w_marginal,entangle_y,objective\n";
  char buf[320];
  for (const HistoryRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.epoch,
                  r.src_acc, r.tgt_acc, r.risk_p, r.risk_q, r.w_marginal, r.entangle_y,
                  r.objective);
    out += buf;
  }
  return out;
}

}  // namespace entot
