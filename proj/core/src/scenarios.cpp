#include "entot/scenarios.hpp"

#include <cmath>

#include "entot/loss.hpp"
#include "entot/ot.hpp"
#include "entot/rng.hpp"

namespace entot {

namespace {

std::vector<Vec> resolve_means(const ShiftConfig& cfg) {
  if (!cfg.class_means.empty()) {
    if (static_cast<int>(cfg.class_means.size()) != cfg.classes)
      throw ConfigError("scenario: class_means count must equal classes");
    for (const Vec& m : cfg.class_means)
      if (static_cast<int>(m.size()) != cfg.input_dim)
        throw ConfigError("scenario: class mean dimension mismatch");
    return cfg.class_means;
  }
  if (cfg.input_dim < cfg.classes)
    throw ConfigError("scenario: default mean placement needs input_dim >= classes");
  std::vector<Vec> means(cfg.classes, Vec(cfg.input_dim, 0.0));
  for (int c = 0; c < cfg.classes; ++c) means[c][c] = cfg.class_mean_radius;
  return means;
}

std::vector<int> class_counts(int n, int classes) {
  std::vector<int> counts(classes, n / classes);
  for (int c = 0; c < n % classes; ++c) ++counts[c];
  return counts;
}

Vec gaussian_point(Rng& rng, const Vec& mean, double sigma) {
  Vec x(mean.size());
  for (size_t i = 0; i < x.size(); ++i) x[i] = mean[i] + sigma * rng.next_normal();
  return x;
}

// Draws count_c points per class; class c carries exactly class_mass[c],
// split evenly inside the class.
EmpiricalJoint draw_domain(Rng rng, const std::vector<Vec>& means, const Vec& class_mass,
                           const std::vector<int>& counts, double sigma, int dim,
                           const Vec& offset) {
  std::vector<Vec> pts;
  std::vector<int> labels;
  Vec weights;
  const int classes = static_cast<int>(means.size());
  for (int c = 0; c < classes; ++c) {
    Rng stream = rng.child(static_cast<uint64_t>(c) + 1);
    double w = class_mass[c] / counts[c];
    for (int t = 0; t < counts[c]; ++t) {
      Vec x = gaussian_point(stream, means[c], sigma);
      for (int i = 0; i < dim; ++i) x[i] += offset[i];
      pts.push_back(std::move(x));
      labels.push_back(c);
      weights.push_back(w);
    }
  }
  return EmpiricalJoint(std::move(pts), std::move(labels), std::move(weights), classes);
}

void validate_base(const ShiftConfig& cfg) {
  if (cfg.classes < 2) throw ConfigError("scenario: need at least two classes");
  if (cfg.points_per_domain < cfg.classes)
    throw ConfigError("scenario: points_per_domain must be at least classes");
  if (cfg.input_dim < 1) throw ConfigError("scenario: input_dim must be positive");
  if (!(cfg.class_cov_scale > 0.0)) throw ConfigError("scenario: class_cov_scale must be positive");
  if (!cfg.translation.empty() && static_cast<int>(cfg.translation.size()) != cfg.input_dim)
    throw ConfigError("scenario: translation dimension mismatch");
}

Vec resolved_translation(const ShiftConfig& cfg) {
  return cfg.translation.empty() ? Vec(cfg.input_dim, 0.0) : cfg.translation;
}

Scenario generate_gradual(const ShiftConfig& cfg, const std::vector<Vec>& means,
                          const Vec& uniform_mass, const std::vector<int>& counts) {
  const GradualParams& gp = cfg.gradual;
  if (gp.s < 1) throw ConfigError("scenario: gradual needs at least one stage");
  if (!(gp.epsilon > 0.0)) throw ConfigError("scenario: gradual epsilon must be positive");
  if (gp.a < 1.0 / gp.s - 1e-12 || gp.a > 1.0 + 1e-12)
    throw ConfigError("scenario: gradual mixture cap must lie in [1/s, 1]");

  Rng root(cfg.seed);
  const Vec zero(cfg.input_dim, 0.0);
  for (int attempt = 0; attempt < 3; ++attempt) {
    EmpiricalJoint source =
        draw_domain(root.child(1 + 16 * attempt), means, uniform_mass, counts,
                    cfg.class_cov_scale, cfg.input_dim, zero);

    // Random step direction, length just inside the link budget. Stages share
    // the source draws, so each link moves every conditional by exactly this
    // step.
    Rng dir_rng = root.child(3 + 16 * attempt);
    Vec delta(cfg.input_dim);
    double norm = 0.0;
    for (int i = 0; i < cfg.input_dim; ++i) {
      delta[i] = dir_rng.next_normal();
      norm += delta[i] * delta[i];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    for (int i = 0; i < cfg.input_dim; ++i) delta[i] *= 0.95 * gp.epsilon / norm;

    std::vector<EmpiricalJoint> chain;
    for (int stage = 1; stage <= gp.s; ++stage) {
      std::vector<Vec> pts = source.inputs();
      for (Vec& x : pts)
        for (int i = 0; i < cfg.input_dim; ++i) x[i] += stage * delta[i];
      chain.emplace_back(std::move(pts), source.labels(), source.weights(), cfg.classes);
    }

    // Verify every link's class-conditional input distance against the
    // budget before accepting the draw.
    bool ok = true;
    auto dist = [](const Vec& a, const Vec& b) { return euclidean_distance(a, b); };
    for (int stage = 0; ok && stage < gp.s; ++stage) {
      const EmpiricalJoint& prev = stage == 0 ? source : chain[stage - 1];
      const EmpiricalJoint& next = chain[stage];
      for (int c = 0; ok && c < cfg.classes; ++c) {
        double w1 = wasserstein(conditional(prev, c), conditional(next, c), CostFn(dist), 1.0);
        if (w1 >= gp.epsilon) ok = false;
      }
    }
    if (!ok) continue;

    // Target: exact mixture of the stages with front-loaded weights capped
    // at a; every class conditional is the same mixture of stage conditionals.
    Vec mix(gp.s, 0.0);
    double remaining = 1.0;
    for (int stage = 0; stage < gp.s; ++stage) {
      mix[stage] = std::min(gp.a, remaining);
      remaining -= mix[stage];
    }
    if (remaining > 1e-12) continue;  // unreachable given the cap validation

    std::vector<Vec> pts;
    std::vector<int> labels;
    Vec weights;
    for (int stage = 0; stage < gp.s; ++stage) {
      if (mix[stage] <= 0.0) continue;
      const EmpiricalJoint& st = chain[stage];
      for (int i = 0; i < st.size(); ++i) {
        pts.push_back(st.inputs()[i]);
        labels.push_back(st.labels()[i]);
        weights.push_back(mix[stage] * st.weights()[i]);
      }
    }
    EmpiricalJoint target(std::move(pts), std::move(labels), std::move(weights), cfg.classes);
    return Scenario{std::move(source), std::move(target), std::move(chain)};
  }
  throw ChainGenerationFailed("scenario: gradual chain missed its link budget repeatedly");
}

}  // namespace

Scenario generate(const ShiftConfig& cfg) {
  validate_base(cfg);
  std::vector<Vec> means = resolve_means(cfg);
  std::vector<int> counts = class_counts(cfg.points_per_domain, cfg.classes);
  Vec uniform_mass(cfg.classes, 1.0 / cfg.classes);
  Rng root(cfg.seed);
  const Vec zero(cfg.input_dim, 0.0);

  switch (cfg.kind) {
    case ShiftKind::Covariate: {
      EmpiricalJoint source = draw_domain(root.child(1), means, uniform_mass, counts,
                                          cfg.class_cov_scale, cfg.input_dim, zero);
      EmpiricalJoint target = draw_domain(root.child(2), means, uniform_mass, counts,
                                          cfg.class_cov_scale, cfg.input_dim,
                                          resolved_translation(cfg));
      return Scenario{std::move(source), std::move(target), {}};
    }
    case ShiftKind::LabelShift: {
      if (static_cast<int>(cfg.target_weights.size()) != cfg.classes)
        throw ConfigError("scenario: label shift needs one target weight per class");
      double sum = 0.0;
      for (double w : cfg.target_weights) {
        if (w < 0.0) throw ConfigError("scenario: negative target weight");
        sum += w;
      }
      if (std::fabs(sum - 1.0) > 1e-9)
        throw ConfigError("scenario: target weights must sum to 1");
      EmpiricalJoint source = draw_domain(root.child(1), means, uniform_mass, counts,
                                          cfg.class_cov_scale, cfg.input_dim, zero);
      // Same conditional samplers (fresh draws, identical law); only the
      // class masses move.
      EmpiricalJoint target = draw_domain(root.child(2), means, cfg.target_weights, counts,
                                          cfg.class_cov_scale, cfg.input_dim, zero);
      return Scenario{std::move(source), std::move(target), {}};
    }
    case ShiftKind::Gradual:
      return generate_gradual(cfg, means, uniform_mass, counts);
    case ShiftKind::Entangling: {
      std::vector<int> perm = cfg.permutation;
      if (perm.empty()) {
        perm.resize(cfg.classes);
        for (int c = 0; c < cfg.classes; ++c) perm[c] = cfg.classes - 1 - c;
      }
      if (static_cast<int>(perm.size()) != cfg.classes)
        throw ConfigError("scenario: permutation size must equal classes");
      std::vector<char> seen(cfg.classes, 0);
      for (int p : perm) {
        if (p < 0 || p >= cfg.classes || seen[p])
          throw ConfigError("scenario: permutation is not a bijection on classes");
        seen[p] = 1;
      }
      EmpiricalJoint source = draw_domain(root.child(1), means, uniform_mass, counts,
                                          cfg.class_cov_scale, cfg.input_dim, zero);
      // Target class c samples around the permuted class's mean: the class
      // geometry swaps between domains.
      std::vector<Vec> permuted(cfg.classes);
      for (int c = 0; c < cfg.classes; ++c) permuted[c] = means[perm[c]];
      EmpiricalJoint target = draw_domain(root.child(2), permuted, uniform_mass, counts,
                                          cfg.class_cov_scale, cfg.input_dim,
                                          resolved_translation(cfg));
      return Scenario{std::move(source), std::move(target), {}};
    }
  }
  throw ConfigError("scenario: unknown shift kind");
}

double energy_distance(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  auto pair_term = [](const DiscreteMeasure& u, const DiscreteMeasure& v) {
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i)
      for (int j = 0; j < v.size(); ++j)
        s += u.weights()[i] * v.weights()[j] * euclidean_distance(u.points()[i], v.points()[j]);
    return s;
  };
  return 2.0 * pair_term(a, b) - pair_term(a, a) - pair_term(b, b);
}

}  // namespace entot
