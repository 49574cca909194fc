#include "entot/measures.hpp"

#include <cmath>

namespace entot {

namespace {

Vec validated_weights(Vec w, size_t expected) {
  if (w.size() != expected)
    throw DimensionMismatch("measure: weight count does not match point count");
  double sum = 0.0;
  for (double x : w) {
    if (!std::isfinite(x)) throw ConfigError("measure: non-finite weight");
    if (x < 0.0) throw ConfigError("measure: negative weight");
    sum += x;
  }
  if (sum <= 0.0) throw ConfigError("measure: total mass must be positive");
  if (std::fabs(sum - 1.0) > 1e-12)
    for (double& x : w) x /= sum;
  return w;
}

void validate_points(const std::vector<Vec>& pts) {
  if (pts.empty()) throw ConfigError("measure: empty support");
  size_t dim = pts[0].size();
  for (const Vec& p : pts) {
    if (p.size() != dim) throw DimensionMismatch("measure: ragged point dimensions");
    for (double x : p)
      if (!std::isfinite(x)) throw ConfigError("measure: non-finite coordinate");
  }
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<Vec> points, Vec weights)
    : points_(std::move(points)), weights_(validated_weights(std::move(weights), points_.size())) {
  validate_points(points_);
}

EmpiricalJoint::EmpiricalJoint(std::vector<Vec> inputs, std::vector<int> labels, Vec weights,
                               int num_classes)
    : inputs_(std::move(inputs)),
      labels_(std::move(labels)),
      weights_(validated_weights(std::move(weights), inputs_.size())),
      num_classes_(num_classes) {
  validate_points(inputs_);
  if (num_classes_ < 1) throw ConfigError("joint: num_classes must be positive");
  if (labels_.size() != inputs_.size())
    throw DimensionMismatch("joint: label count does not match point count");
  for (int y : labels_)
    if (y < 0 || y >= num_classes_) throw ConfigError("joint: label outside class range");
}

Vec one_hot(int label, int num_classes) {
  if (label < 0 || label >= num_classes) throw ConfigError("one_hot: label outside class range");
  Vec v(num_classes, 0.0);
  v[label] = 1.0;
  return v;
}

EmpiricalJoint pushforward(const EmpiricalJoint& joint, const ModelFn& f) {
  std::vector<Vec> outputs;
  outputs.reserve(joint.size());
  for (const Vec& x : joint.inputs()) outputs.push_back(f(x));
  return EmpiricalJoint(std::move(outputs), joint.labels(), joint.weights(),
                        joint.num_classes());
}

DiscreteMeasure conditional(const EmpiricalJoint& joint, int label) {
  std::vector<Vec> pts;
  Vec w;
  for (int i = 0; i < joint.size(); ++i) {
    if (joint.labels()[i] != label) continue;
    if (joint.weights()[i] <= 0.0) continue;
    pts.push_back(joint.inputs()[i]);
    w.push_back(joint.weights()[i]);
  }
  if (pts.empty()) throw EmptyClass("conditional: class " + std::to_string(label) + " carries no mass");
  return DiscreteMeasure(std::move(pts), std::move(w));
}

DiscreteMeasure label_marginal(const EmpiricalJoint& joint) {
  const int m = joint.num_classes();
  std::vector<Vec> pts;
  pts.reserve(m);
  for (int c = 0; c < m; ++c) pts.push_back(one_hot(c, m));
  return DiscreteMeasure(std::move(pts), class_masses(joint));
}

DiscreteMeasure input_marginal(const EmpiricalJoint& joint) {
  return DiscreteMeasure(joint.inputs(), joint.weights());
}

Vec class_masses(const EmpiricalJoint& joint) {
  Vec masses(joint.num_classes(), 0.0);
  for (int i = 0; i < joint.size(); ++i) masses[joint.labels()[i]] += joint.weights()[i];
  return masses;
}

}  // namespace entot
