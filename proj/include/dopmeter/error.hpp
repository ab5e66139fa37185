#pragma once

#include <stdexcept>
#include <string>

namespace dopmeter {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad caller input: violated precondition, malformed config or data file.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

// Physics-domain failures. The CLI maps these to a distinct exit code.
class DomainError : public Error {
public:
  using Error::Error;
};

// Wavelength outside a material's Sellmeier validity window.
class OutOfRange : public DomainError {
public:
  using DomainError::DomainError;
};

// Delta-k has no sign change on the angular search interval.
class NoPhaseMatch : public DomainError {
public:
  using DomainError::DomainError;
};

// A limit criterion is never met inside the wavelength scan band.
class BandExceeded : public DomainError {
public:
  using DomainError::DomainError;
};

// Least-squares design matrix is rank deficient.
class DegenerateFit : public DomainError {
public:
  using DomainError::DomainError;
};

}  // namespace dopmeter
