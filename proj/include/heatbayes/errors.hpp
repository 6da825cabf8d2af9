#pragma once

#include <stdexcept>
#include <string>

namespace heatbayes {

// Base class for every error raised by the library. Numerical failures derive
// from NumericalError so callers (the CLI) can map them to a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class MeshFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyGrid : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonPositiveCoefficient : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class EigenFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class LinearSolveFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PointOutsideMesh : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class MeshMismatch : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class TruncationTooLarge : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace heatbayes
