#pragma once

#include <cstdint>
#include <vector>

#include "entot/common.hpp"

namespace entot {

// Pair of Gaussians over concatenated (x, y) blocks, x first. The second
// covariance is a scalar-scaled copy of the first: sigma' = scale^2 * sigma.
// Construction validates symmetry and SPD-ness (minimum eigenvalue above
// 1e-10), throwing NotSpd otherwise.
class GaussianPair {
 public:
  GaussianPair(Vec mu, Vec mu_prime, std::vector<double> sigma, double scale, int dim_x);

  const Vec& mu() const { return mu_; }
  const Vec& mu_prime() const { return mu_prime_; }
  const std::vector<double>& sigma() const { return sigma_; }  // row-major d*d
  double scale() const { return scale_; }
  int dim() const { return static_cast<int>(mu_.size()); }
  int dim_x() const { return dim_x_; }
  int dim_y() const { return dim() - dim_x_; }

 private:
  Vec mu_;
  Vec mu_prime_;
  std::vector<double> sigma_;
  double scale_;
  int dim_x_;
};

// Symmetric PSD square root via eigendecomposition; eigenvalues clamped at
// 1e-12 and the result verified by squaring back to within 1e-9 (relative to
// the input scale). Throws NotSpd on asymmetric or indefinite input.
std::vector<double> matrix_sqrt(const std::vector<double>& m, int d);

// Squared order-2 distance between Gaussians:
//   |mu_a - mu_b|^2 + tr(Sa + Sb - 2 (Sa^{1/2} Sb Sa^{1/2})^{1/2}).
double gaussian_w2_squared(const Vec& mu_a, const std::vector<double>& sigma_a, const Vec& mu_b,
                           const std::vector<double>& sigma_b);

struct DecompositionCheck {
  double joint = 0.0;             // closed-form squared distance of the pair
  double label_term = 0.0;        // closed-form squared distance of the y marginals
  double conditional_term = 0.0;  // Monte-Carlo coupled conditional squared distance
  double rhs = 0.0;               // label_term + conditional_term
  double mc_std_error = 0.0;
  int samples = 0;
  double tolerance = 0.0;
  bool passed = false;
};

// Certifies that the joint squared distance splits exactly into the
// y-marginal squared distance plus the expected conditional squared distance
// along the optimal marginal map T(y) = mu'_y + scale * (y - mu_y). The two
// sides are computed independently: the left by the closed form on the full
// blocks, the right by the closed form on the y blocks plus seeded
// Monte-Carlo integration of the conditional term. Tolerance is
// max(1e-6 * max(1, |lhs|), 3 * standard error). Throws QuadratureNotConverged
// when the Monte-Carlo error is too large to decide the identity.
DecompositionCheck verify_scaled_decomposition(const GaussianPair& pair, uint64_t seed,
                                               int samples = 100000);

}  // namespace entot
