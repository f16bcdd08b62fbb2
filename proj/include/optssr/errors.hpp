#pragma once

#include <stdexcept>
#include <string>

namespace optssr {

/// Base class for all failures raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A scalar inversion was asked for a value outside the attainable range.
struct BracketError : Error {
  using Error::Error;
};

/// Strength parameters degenerate for the requested operation
/// (e.g. frictionless inversion with no unique preimage).
struct DegenerateReduction : Error {
  using Error::Error;
};

/// The return-mapping branch tests failed to classify a strain; only
/// reachable through non-finite input.
struct ClassificationGap : Error {
  using Error::Error;
};

/// The reference projection solver exhausted its iteration budget.
struct OracleNoConvergence : Error {
  using Error::Error;
};

/// Malformed input file (mesh or config); message carries the line number.
struct ParseError : Error {
  using Error::Error;
};

/// Mesh connectivity is inconsistent (non-conforming edges, bad indices,
/// inverted or duplicate elements, unlabeled boundary).
struct TopologyError : Error {
  using Error::Error;
};

/// Refinement produced an element below the minimum-angle threshold.
struct QualityError : Error {
  using Error::Error;
};

/// Filesystem-level read/write failure.
struct IoError : Error {
  using Error::Error;
};

/// The regularized tangent stayed numerically singular after diagonal
/// regularization escalation.
struct LinearSolveError : Error {
  using Error::Error;
};

/// No feasible factor was found inside the search window.
struct SearchFailure : Error {
  using Error::Error;
};

/// Invalid or inconsistent run configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace optssr
