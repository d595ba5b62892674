#pragma once

#include <stdexcept>
#include <string>

namespace nlw {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not fit the operation.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A precondition on an argument was violated (non-Hermitian input, bad tag).
class ContractError : public Error {
  public:
    using Error::Error;
};

/// A numerical consistency check failed (imaginary residue, non-convergence).
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// A scalar parameter lies outside its admissible range.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A witness could not be built from the requested target.
class ConstructionError : public Error {
  public:
    using Error::Error;
};

/// A measurement basis is incomplete or not a product basis.
class BasisError : public Error {
  public:
    using Error::Error;
};

/// A probability was requested from a group with zero counts.
class UndefinedProbabilityError : public Error {
  public:
    using Error::Error;
};

/// A statistics parameter is unusable (e.g. fewer than two resamples).
class ParameterError : public Error {
  public:
    using Error::Error;
};

/// The measurement plan for a witness is not the standard eight-setting one.
class UnsupportedError : public Error {
  public:
    using Error::Error;
};

/// The projector set does not span the two-qubit operator space.
class InformationalCompletenessError : public Error {
  public:
    using Error::Error;
};

/// A sweep or CLI configuration is invalid.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// An output file could not be written.
class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace nlw
