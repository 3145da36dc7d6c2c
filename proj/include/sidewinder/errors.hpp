#pragma once

#include <stdexcept>
#include <string>

namespace sidewinder {

// All recoverable failures are typed so callers can map them to exit codes
// and per-trial failure records without string matching.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config value outside its documented range.
struct RangeError : ConfigError {
  using ConfigError::ConfigError;
};

// Malformed config document: wrong type, missing field, or unknown key.
struct SchemaError : ConfigError {
  using ConfigError::ConfigError;
};

// Requested geometry does not fit inside the board.
struct BoundsExceeded : ConfigError {
  using ConfigError::ConfigError;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Step solve stopped with a first-order residual above tolerance.
struct NonConvergence : SolverError {
  using SolverError::SolverError;
};

// No feasible configuration: obstacle clearance cannot be restored.
struct Jammed : SolverError {
  using SolverError::SolverError;
};

// Admissible angle interval came out empty/inverted (cable command bug).
struct InvertedInterval : std::logic_error {
  using std::logic_error::logic_error;
};

// Laid-out body self-intersects; wavelength is undefined there.
struct ShapeDegenerate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Metric requested over a history too short to contain one full cycle.
struct TooShort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cost of transport is undefined for zero net displacement.
struct ZeroDisplacement : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Plot routine fed results from a different experiment type.
struct MismatchedExperiment : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sidewinder
