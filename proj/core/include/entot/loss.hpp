#pragma once

#include <vector>

#include "entot/common.hpp"
#include "entot/rng.hpp"

namespace entot {

enum class LossKind { EuclideanOnSimplex, SquaredEuclidean, Kronecker, CustomMatrix };

// Ground loss on the prediction simplex together with its certified
// constants:
//   upper           largest value the loss attains on the embedded domain
//   min_sep         smallest loss between distinct one-hot labels
//   triangle_factor smallest k with loss(a,b) <= k * (loss(a,c) + loss(c,b))
// A loss with triangle_factor == 1 is a metric; bound checks that require a
// metric refuse anything else.
struct LossSpec {
  LossKind kind = LossKind::EuclideanOnSimplex;
  double upper = 0.0;
  double min_sep = 0.0;
  double triangle_factor = 1.0;
  int num_classes = 0;          // CustomMatrix only
  std::vector<double> matrix;   // CustomMatrix only, row-major num_classes^2

  double operator()(const Vec& a, const Vec& b) const;
  bool is_metric() const { return triangle_factor == 1.0; }

  // Constants below are exact on the closed probability simplex.
  static LossSpec euclidean();          // upper = sqrt(2), min_sep = sqrt(2), factor 1
  static LossSpec squared_euclidean();  // upper = 2, min_sep = 2, factor 2
  static LossSpec kronecker();          // discrete metric, upper = min_sep = 1
  static LossSpec custom_matrix(std::vector<double> m, int classes);

  // Samples pairs/triples (vertices for CustomMatrix, simplex points
  // otherwise) and validates identity, symmetry, range, min_sep and the
  // triangle factor. Throws ConfigError on any breach.
  void certify(Rng rng, int num_samples = 500) const;
};

double euclidean_distance(const Vec& a, const Vec& b);

}  // namespace entot
