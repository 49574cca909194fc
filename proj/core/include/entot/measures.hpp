#pragma once

#include <functional>
#include <vector>

#include "entot/common.hpp"

namespace entot {

// Weighted point cloud. Weights are validated at construction: finite,
// non-negative, positive total; the vector is renormalized whenever the sum
// drifts from 1 by more than 1e-12. Instances are immutable; every
// transformation returns a new value.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<Vec> points, Vec weights);

  const std::vector<Vec>& points() const { return points_; }
  const Vec& weights() const { return weights_; }
  int size() const { return static_cast<int>(points_.size()); }
  int dim() const { return points_.empty() ? 0 : static_cast<int>(points_[0].size()); }

 private:
  std::vector<Vec> points_;
  Vec weights_;
};

// Weighted labeled sample: atoms (input, label, weight) with labels in
// [0, num_classes). Duplicate atoms are kept as-is (they represent
// multiplicity). Immutable, like DiscreteMeasure.
class EmpiricalJoint {
 public:
  EmpiricalJoint(std::vector<Vec> inputs, std::vector<int> labels, Vec weights,
                 int num_classes);

  const std::vector<Vec>& inputs() const { return inputs_; }
  const std::vector<int>& labels() const { return labels_; }
  const Vec& weights() const { return weights_; }
  int num_classes() const { return num_classes_; }
  int size() const { return static_cast<int>(inputs_.size()); }
  int dim() const { return inputs_.empty() ? 0 : static_cast<int>(inputs_[0].size()); }

 private:
  std::vector<Vec> inputs_;
  std::vector<int> labels_;
  Vec weights_;
  int num_classes_;
};

// Hypothesis: maps an input vector to a prediction vector. Plain callable so
// tests can pass identity or ad-hoc maps alongside trained models.
using ModelFn = std::function<Vec(const Vec&)>;

// Labels embed as one-hot vertices of the prediction simplex.
Vec one_hot(int label, int num_classes);

// Applies f to every input, keeping labels and weights. Mass and the label
// marginal are preserved exactly.
EmpiricalJoint pushforward(const EmpiricalJoint& joint, const ModelFn& f);

// Conditional input distribution given a label, renormalized within the
// class. Throws EmptyClass when the class carries no mass.
DiscreteMeasure conditional(const EmpiricalJoint& joint, int label);

// Marginal over labels as a measure supported on all one-hot vertices
// (classes with zero mass keep their support point).
DiscreteMeasure label_marginal(const EmpiricalJoint& joint);

// Marginal over inputs (labels forgotten, atoms kept).
DiscreteMeasure input_marginal(const EmpiricalJoint& joint);

// Per-class mass vector of length num_classes.
Vec class_masses(const EmpiricalJoint& joint);

}  // namespace entot
