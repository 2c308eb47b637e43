#pragma once

#include <stdexcept>

namespace dirac {

// Base of every error raised by the toolkit. Front ends map subclasses to
// exit codes; anything deriving from InvalidInput is a validation failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class DenominatorVanishes : public Error {
 public:
  using Error::Error;
};

// Constraint engine
class NonTerminating : public Error {
 public:
  using Error::Error;
};

class UndeterminedSystem : public Error {
 public:
  using Error::Error;
};

class SamplerExhausted : public Error {
 public:
  using Error::Error;
};

class SingularCMatrix : public Error {
 public:
  using Error::Error;
};

// Reduction and dynamics
class BranchInvalid : public Error {
 public:
  using Error::Error;
};

class ReductionUnsupported : public Error {
 public:
  using Error::Error;
};

class OutsideDomain : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class ConstraintViolation : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Quantization
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonHermitian : public Error {
 public:
  using Error::Error;
};

}  // namespace dirac
