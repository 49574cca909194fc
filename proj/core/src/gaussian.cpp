#include "entot/gaussian.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "entot/rng.hpp"

namespace entot {

namespace {

using Mat = Eigen::MatrixXd;
using EVec = Eigen::VectorXd;

Mat to_eigen(const std::vector<double>& m, int rows, int cols) {
  if (m.size() != static_cast<size_t>(rows) * cols)
    throw DimensionMismatch("matrix size disagrees with declared shape");
  Mat out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = m[static_cast<size_t>(i) * cols + j];
  return out;
}

std::vector<double> from_eigen(const Mat& m) {
  std::vector<double> out(static_cast<size_t>(m.rows()) * m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[static_cast<size_t>(i) * m.cols() + j] = m(i, j);
  return out;
}

void require_symmetric(const Mat& m, const char* what) {
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw NotSpd(std::string(what) + ": matrix is not symmetric");
}

Mat sqrt_spd(const Mat& m, const char* what) {
  require_symmetric(m, what);
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) throw NotSpd(std::string(what) + ": eigendecomposition failed");
  EVec vals = es.eigenvalues();
  double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  for (int i = 0; i < vals.size(); ++i) {
    if (vals[i] < -1e-9 * scale)
      throw NotSpd(std::string(what) + ": negative eigenvalue");
    vals[i] = std::sqrt(std::max(vals[i], 1e-12));
  }
  Mat root = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
  if ((root * root - m).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw NotSpd(std::string(what) + ": square root failed to square back");
  return root;
}

double w2_squared(const EVec& mu_a, const Mat& sa, const EVec& mu_b, const Mat& sb) {
  Mat ra = sqrt_spd(sa, "gaussian_w2_squared");
  Mat inner = ra * sb * ra;
  inner = 0.5 * (inner + inner.transpose());  // symmetrize float dust
  Mat cross = sqrt_spd(inner, "gaussian_w2_squared");
  double mean_part = (mu_a - mu_b).squaredNorm();
  double trace_part = sa.trace() + sb.trace() - 2.0 * cross.trace();
  return mean_part + std::max(trace_part, 0.0);
}

}  // namespace

GaussianPair::GaussianPair(Vec mu, Vec mu_prime, std::vector<double> sigma, double scale,
                           int dim_x)
    : mu_(std::move(mu)), mu_prime_(std::move(mu_prime)), sigma_(std::move(sigma)),
      scale_(scale), dim_x_(dim_x) {
  const int d = dim();
  if (d < 2) throw ConfigError("GaussianPair: need at least two dimensions");
  if (mu_prime_.size() != mu_.size()) throw DimensionMismatch("GaussianPair: mean sizes disagree");
  if (dim_x_ < 1 || dim_x_ >= d) throw ConfigError("GaussianPair: dim_x must split the blocks");
  if (!(scale_ > 0.0)) throw ConfigError("GaussianPair: scale must be positive");
  Mat s = to_eigen(sigma_, d, d);
  require_symmetric(s, "GaussianPair");
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 1e-10)
    throw NotSpd("GaussianPair: covariance must be SPD (min eigenvalue above 1e-10)");
}

std::vector<double> matrix_sqrt(const std::vector<double>& m, int d) {
  return from_eigen(sqrt_spd(to_eigen(m, d, d), "matrix_sqrt"));
}

double gaussian_w2_squared(const Vec& mu_a, const std::vector<double>& sigma_a, const Vec& mu_b,
                           const std::vector<double>& sigma_b) {
  const int d = static_cast<int>(mu_a.size());
  if (mu_b.size() != mu_a.size()) throw DimensionMismatch("gaussian_w2_squared: mean sizes disagree");
  EVec ma(d), mb(d);
  for (int i = 0; i < d; ++i) {
    ma[i] = mu_a[i];
    mb[i] = mu_b[i];
  }
  return w2_squared(ma, to_eigen(sigma_a, d, d), mb, to_eigen(sigma_b, d, d));
}

DecompositionCheck verify_scaled_decomposition(const GaussianPair& pair, uint64_t seed,
                                               int samples) {
  if (samples < 100) throw ConfigError("verify_scaled_decomposition: too few samples");
  const int d = pair.dim();
  const int dx = pair.dim_x();
  const int dy = pair.dim_y();
  const double s = pair.scale();

  Mat sigma = to_eigen(pair.sigma(), d, d);
  Mat sigma_prime = s * s * sigma;
  EVec mu(d), mu_prime(d);
  for (int i = 0; i < d; ++i) {
    mu[i] = pair.mu()[i];
    mu_prime[i] = pair.mu_prime()[i];
  }

  DecompositionCheck out;
  out.samples = samples;

  // Left side: one closed-form evaluation on the full blocks.
  out.joint = w2_squared(mu, sigma, mu_prime, sigma_prime);

  // Right side, marginal part: closed form on the y blocks.
  Mat sy = sigma.block(dx, dx, dy, dy);
  EVec mu_y = mu.tail(dy), mu_py = mu_prime.tail(dy);
  out.label_term = w2_squared(mu_y, sy, mu_py, Mat(s * s * sy));

  // Right side, conditional part. Both conditionals share the regression
  // matrix K = Sigma_xy Sigma_y^{-1} (the scale cancels), covariances are
  // Sigma_{x|y} and s^2 Sigma_{x|y}, and the optimal marginal map is
  // T(y) = mu'_y + s (y - mu_y). The coupled conditional mean gap is
  //   (mu_x - mu'_x) + (1 - s) K (y - mu_y),
  // integrated by seeded Monte-Carlo over y ~ N(mu_y, Sigma_y).
  Mat sxy = sigma.block(0, dx, dx, dy);
  Mat sx = sigma.block(0, 0, dx, dx);
  Mat k = sxy * sy.inverse();
  Mat sigma_cond = sx - k * sigma.block(dx, 0, dy, dx);
  sigma_cond = 0.5 * (sigma_cond + sigma_cond.transpose());
  EVec zero = EVec::Zero(dx);
  double cov_term = w2_squared(zero, sigma_cond, zero, Mat(s * s * sigma_cond));

  Eigen::SelfAdjointEigenSolver<Mat> es(sy);
  if (es.info() != Eigen::Success) throw NotSpd("verify_scaled_decomposition: y block not SPD");
  EVec vals = es.eigenvalues();
  for (int i = 0; i < vals.size(); ++i) vals[i] = std::sqrt(std::max(vals[i], 0.0));
  Mat factor = es.eigenvectors() * vals.asDiagonal();

  Rng rng = Rng(seed).child(0x6761757373ULL);
  EVec base = mu - mu_prime;
  EVec base_x = base.head(dx);
  double sum = 0.0, sum_sq = 0.0;
  EVec z(dy);
  for (int t = 0; t < samples; ++t) {
    for (int i = 0; i < dy; ++i) z[i] = rng.next_normal();
    EVec dev = factor * z;  // y - mu_y
    EVec gap = base_x + (1.0 - s) * (k * dev);
    double v = gap.squaredNorm();
    sum += v;
    sum_sq += v * v;
  }
  double mean = sum / samples;
  double var = std::max(0.0, sum_sq / samples - mean * mean);
  out.mc_std_error = std::sqrt(var / samples);
  out.conditional_term = mean + cov_term;
  out.rhs = out.label_term + out.conditional_term;

  double ref = std::max(1.0, std::fabs(out.joint));
  if (3.0 * out.mc_std_error > 0.05 * ref)
    throw QuadratureNotConverged("verify_scaled_decomposition: Monte-Carlo error too large");
  out.tolerance = std::max(1e-6 * ref, 3.0 * out.mc_std_error);
  out.passed = std::fabs(out.joint - out.rhs) <= out.tolerance;
  return out;
}

}  // namespace entot
