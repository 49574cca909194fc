#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace entot {

using Vec = std::vector<double>;

// Error taxonomy. Every throwing path uses one of these so callers (CLI,
// acceptance harness) can map failures to exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyClass : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotSpd : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureNotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChainGenerationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChainViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Diverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingClass : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FeatureTermUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Certified inequality failed beyond tolerance; carries the offending slack.
struct BoundViolated : std::runtime_error {
  double slack;
  BoundViolated(const std::string& what, double slack_)
      : std::runtime_error(what), slack(slack_) {}
};

struct SandwichViolated : BoundViolated {
  using BoundViolated::BoundViolated;
};

}  // namespace entot
