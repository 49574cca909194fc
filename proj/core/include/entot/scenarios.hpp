#pragma once

#include <cstdint>
#include <vector>

#include "entot/measures.hpp"

namespace entot {

enum class ShiftKind { Covariate, LabelShift, Gradual, Entangling };

struct GradualParams {
  double a = 1.0;       // cap on each mixture weight, must lie in [1/s, 1]
  double epsilon = 0.05;  // per-link input-space budget
  int s = 1;            // number of chain stages
};

// Synthetic shift family: isotropic Gaussian class conditionals with means
// on a scaled coordinate simplex (or explicit class_means), one seed driving
// every draw through counter-based streams, so regeneration is bit-identical.
struct ShiftConfig {
  ShiftKind kind = ShiftKind::Covariate;
  int classes = 2;
  int points_per_domain = 64;
  int input_dim = 2;
  std::vector<Vec> class_means;  // empty: class c mean = class_mean_radius * e_c
  double class_mean_radius = 3.0;
  double class_cov_scale = 0.5;
  uint64_t seed = 0;
  Vec translation;                    // Covariate and Entangling; empty means zero
  std::vector<double> target_weights;  // LabelShift: exact target class masses
  GradualParams gradual;              // Gradual
  std::vector<int> permutation;       // Entangling; empty means class reversal
};

struct Scenario {
  EmpiricalJoint source;
  EmpiricalJoint target;
  // Gradual only: stages 1..s; stage 0 is the source itself. Stage points are
  // the source draws translated in lockstep, so each link's class-conditional
  // input distance is exactly the step length, verified at generation. The
  // per-model output-space budget is re-checked by the bound layer (a general
  // model need not be 1-Lipschitz).
  std::vector<EmpiricalJoint> chain;
};

// Throws ConfigError on invalid configuration, ChainGenerationFailed when a
// gradual chain cannot meet its link budget within the retry allowance.
Scenario generate(const ShiftConfig& cfg);

// Two-sample energy distance, used as a same-sampler sanity gate.
double energy_distance(const DiscreteMeasure& a, const DiscreteMeasure& b);

}  // namespace entot
