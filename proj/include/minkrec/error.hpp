#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace minkrec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class NoSpanningTriple : public Error {
 public:
  using Error::Error;
};

class GenerationFailed : public Error {
 public:
  using Error::Error;
};

/// The half-space intersection is unbounded along the line Q_i ∩ Q_j.
class UnboundedEdge : public Error {
 public:
  UnboundedEdge(std::size_t i, std::size_t j)
      : Error("unbounded edge between faces " + std::to_string(i) + " and " +
              std::to_string(j)),
        face_i(i),
        face_j(j) {}

  std::size_t face_i;
  std::size_t face_j;
};

class StaleTable : public Error {
 public:
  using Error::Error;
};

class DegenerateGramSystem : public Error {
 public:
  using Error::Error;
};

class NonpositiveInitialArea : public Error {
 public:
  using Error::Error;
};

class DegenerateMesh : public Error {
 public:
  using Error::Error;
};

/// Signals a broken internal invariant (e.g. a substantially negative area).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace minkrec
