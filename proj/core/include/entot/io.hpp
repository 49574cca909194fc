#pragma once

#include <string>

#include "entot/entangle.hpp"
#include "entot/gaussian.hpp"
#include "entot/measures.hpp"
#include "entot/ot.hpp"
#include "entot/scenarios.hpp"
#include "entot/train.hpp"

namespace entot {

// JSON readers reject unknown keys, wrong types, non-finite numbers and
// negative weights with ConfigError; writers emit material the matching
// reader round-trips exactly. File helpers throw ConfigError on a missing or
// unwritable path.

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// {"points": [[...]], "weights": [...], "labels": [...], "num_classes": M};
// labels and num_classes are optional for a plain measure and ignored when
// present.
DiscreteMeasure measure_from_json(const std::string& text);
std::string measure_to_json(const DiscreteMeasure& m);

EmpiricalJoint joint_from_json(const std::string& text);  // labels required here
std::string joint_to_json(const EmpiricalJoint& j);

// {"mu": [...], "mu_prime": [...], "sigma": [[...]], "scale": s, "dim_x": k}
GaussianPair gaussian_pair_from_json(const std::string& text);
std::string gaussian_pair_to_json(const GaussianPair& p);

ShiftConfig shift_config_from_json(const std::string& text);
std::string shift_config_to_json(const ShiftConfig& c);

TrainConfig train_config_from_json(const std::string& text);
std::string train_config_to_json(const TrainConfig& c);

Model model_from_json(const std::string& text);
std::string model_to_json(const Model& m);

std::string coupling_to_json(const Coupling& c);

// Eight named fields, one CSV header plus one row; JSON adds "approximate".
std::string entanglement_report_to_csv(const EntanglementReport& r);
std::string entanglement_report_to_json(const EntanglementReport& r);

}  // namespace entot
