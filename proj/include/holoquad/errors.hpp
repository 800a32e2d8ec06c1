#pragma once

#include <stdexcept>
#include <string>

namespace holoquad {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// bad parameters, arguments outside a formula's region, invalid geometry
class DomainError : public Error {
public:
  using Error::Error;
};

class PoleError : public DomainError {
public:
  using DomainError::DomainError;
};

// parameters too close to an integer for a generic formula
class DegenerateError : public DomainError {
public:
  using DomainError::DomainError;
};

// truncation cap hit, quadrature disagreement, root bracket lost
class NumericalError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace holoquad
