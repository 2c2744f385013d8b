#pragma once

#include <stdexcept>
#include <string>

namespace reyeweb {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input violates a precondition (rank drop, zero vector, coincident points...).
struct DegenerateInput : Error {
  using Error::Error;
};

/// An iterative solve exhausted its iteration budget.
struct NoConvergence : Error {
  using Error::Error;
};

/// A resultant or determinant that should carry information vanished identically.
struct IdenticallyZero : Error {
  using Error::Error;
};

/// Random search for a generic instance exhausted its retry budget.
struct GenericityExhausted : Error {
  using Error::Error;
};

/// An enumerative count disagreed with the expected value.
struct CountMismatch : Error {
  int expected;
  int found;
  CountMismatch(const std::string& msg, int expected_, int found_)
      : Error(msg), expected(expected_), found(found_) {}
};

/// Singular value spectrum has no clear gap at the requested tolerance.
struct RankDeficiencyAmbiguous : Error {
  using Error::Error;
};

/// Sampling loop hit its budget before producing the requested items.
struct SampleBudgetExceeded : Error {
  using Error::Error;
};

/// A pencil expected to be bitangent failed its perfect-square certificate.
struct BitangencyFailed : Error {
  using Error::Error;
};

/// Continuation step size shrank below the configured minimum.
struct StepUnderflow : Error {
  using Error::Error;
};

/// A continuation path passed too close to the branch locus.
struct BranchHit : Error {
  using Error::Error;
};

/// Point handed to a quadric operation does not lie on the quadric.
struct PointNotOnQuadric : Error {
  using Error::Error;
};

/// Quadric is a cone and the requested point is its vertex.
struct VertexPoint : Error {
  using Error::Error;
};

/// Lines handed to a same-ruling test do not both lie on the quadric.
struct LinesNotOnQuadric : Error {
  using Error::Error;
};

/// Matrix rank fell below what the operation requires.
struct RankTooLow : Error {
  using Error::Error;
};

/// Determinant of the fundamental-curve matrix dropped degree.
struct DegreeDrop : Error {
  using Error::Error;
};

/// I/O failure (missing file, malformed JSON, unwritable path).
struct IoError : Error {
  using Error::Error;
};

}  // namespace reyeweb
