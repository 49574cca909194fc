#include "entot/loss.hpp"

#include <cmath>
#include <limits>

#include "entot/measures.hpp"

namespace entot {

double euclidean_distance(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionMismatch("euclidean_distance: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

namespace {

// Exact-equality discrete metric; identical atoms (same bits) are the only
// pairs at distance zero.
bool same_point(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

// CustomMatrix lives on label vertices only.
int vertex_index(const Vec& v) {
  int hit = -1;
  for (size_t i = 0; i < v.size(); ++i) {
    if (std::fabs(v[i] - 1.0) <= 1e-9) {
      if (hit >= 0) throw ConfigError("custom-matrix loss applied to a non-vertex point");
      hit = static_cast<int>(i);
    } else if (std::fabs(v[i]) > 1e-9) {
      throw ConfigError("custom-matrix loss applied to a non-vertex point");
    }
  }
  if (hit < 0) throw ConfigError("custom-matrix loss applied to a non-vertex point");
  return hit;
}

}  // namespace

double LossSpec::operator()(const Vec& a, const Vec& b) const {
  switch (kind) {
    case LossKind::EuclideanOnSimplex:
      return euclidean_distance(a, b);
    case LossKind::SquaredEuclidean: {
      double d = euclidean_distance(a, b);
      return d * d;
    }
    case LossKind::Kronecker:
      return same_point(a, b) ? 0.0 : 1.0;
    case LossKind::CustomMatrix: {
      int i = vertex_index(a);
      int j = vertex_index(b);
      if (i >= num_classes || j >= num_classes)
        throw DimensionMismatch("custom-matrix loss: vertex outside class range");
      return matrix[static_cast<size_t>(i) * num_classes + j];
    }
  }
  throw ConfigError("unknown loss kind");
}

LossSpec LossSpec::euclidean() {
  LossSpec s;
  s.kind = LossKind::EuclideanOnSimplex;
  s.upper = std::sqrt(2.0);
  s.min_sep = std::sqrt(2.0);
  s.triangle_factor = 1.0;
  return s;
}

LossSpec LossSpec::squared_euclidean() {
  LossSpec s;
  s.kind = LossKind::SquaredEuclidean;
  s.upper = 2.0;
  s.min_sep = 2.0;
  s.triangle_factor = 2.0;
  return s;
}

LossSpec LossSpec::kronecker() {
  LossSpec s;
  s.kind = LossKind::Kronecker;
  s.upper = 1.0;
  s.min_sep = 1.0;
  s.triangle_factor = 1.0;
  return s;
}

LossSpec LossSpec::custom_matrix(std::vector<double> m, int classes) {
  if (classes < 2) throw ConfigError("custom-matrix loss needs at least 2 classes");
  if (m.size() != static_cast<size_t>(classes) * classes)
    throw ConfigError("custom-matrix loss: matrix size mismatch");
  LossSpec s;
  s.kind = LossKind::CustomMatrix;
  s.num_classes = classes;
  s.matrix = std::move(m);
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < classes; ++i) {
    for (int j = 0; j < classes; ++j) {
      double v = s.matrix[static_cast<size_t>(i) * classes + j];
      if (!std::isfinite(v) || v < 0.0) throw ConfigError("custom-matrix loss: bad entry");
      if (i == j && v != 0.0) throw ConfigError("custom-matrix loss: nonzero diagonal");
      if (i != j && s.matrix[static_cast<size_t>(j) * classes + i] != v)
        throw ConfigError("custom-matrix loss: asymmetric matrix");
      hi = std::max(hi, v);
      if (i != j) lo = std::min(lo, v);
    }
  }
  if (lo <= 0.0) throw ConfigError("custom-matrix loss: off-diagonal entries must be positive");
  s.upper = hi;
  s.min_sep = lo;
  // Worst triple ratio over the finite class set; exact, not sampled.
  double factor = 1.0;
  for (int i = 0; i < classes; ++i)
    for (int j = 0; j < classes; ++j)
      for (int k = 0; k < classes; ++k) {
        if (i == j) continue;
        double denom = s.matrix[static_cast<size_t>(i) * classes + k] +
                       s.matrix[static_cast<size_t>(k) * classes + j];
        if (denom > 0.0)
          factor = std::max(factor, s.matrix[static_cast<size_t>(i) * classes + j] / denom);
      }
  s.triangle_factor = factor;
  return s;
}

namespace {

Vec random_simplex_point(Rng& rng, int dim) {
  Vec v(dim);
  double sum = 0.0;
  for (int i = 0; i < dim; ++i) {
    v[i] = -std::log(rng.next_unit());
    sum += v[i];
  }
  for (int i = 0; i < dim; ++i) v[i] /= sum;
  return v;
}

}  // namespace

void LossSpec::certify(Rng rng, int num_samples) const {
  const int dim = kind == LossKind::CustomMatrix ? num_classes : 4;
  auto sample = [&]() -> Vec {
    if (kind == LossKind::CustomMatrix)
      return one_hot(static_cast<int>(rng.next_below(num_classes)), num_classes);
    return random_simplex_point(rng, dim);
  };
  const LossSpec& loss = *this;
  for (int t = 0; t < num_samples; ++t) {
    Vec a = sample();
    Vec b = sample();
    Vec c = sample();
    double ab = loss(a, b);
    double ba = loss(b, a);
    double aa = loss(a, a);
    if (aa != 0.0) throw ConfigError("loss certify: identity violated");
    if (std::fabs(ab - ba) > 1e-12) throw ConfigError("loss certify: symmetry violated");
    if (!(ab >= 0.0) || ab > upper + 1e-12) throw ConfigError("loss certify: range violated");
    double lhs = ab;
    double rhs = triangle_factor * (loss(a, c) + loss(c, b));
    if (lhs > rhs + 1e-9) throw ConfigError("loss certify: triangle factor violated");
  }
  // min_sep is a statement about distinct one-hot labels; enumerate them.
  const int classes = kind == LossKind::CustomMatrix ? num_classes : dim;
  for (int i = 0; i < classes; ++i)
    for (int j = 0; j < classes; ++j) {
      if (i == j) continue;
      Vec ei = one_hot(i, classes);
      Vec ej = one_hot(j, classes);
      if (loss(ei, ej) < min_sep - 1e-12)
        throw ConfigError("loss certify: min_sep violated");
    }
}

}  // namespace entot
