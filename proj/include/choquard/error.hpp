#pragma once

#include <stdexcept>
#include <string>

namespace choquard {

// Base of every failure raised by the numerical core. The C API maps each
// subclass onto one status code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class GridMismatch : public Error {
public:
  GridMismatch() : Error("fields live on different grids") {}
};

class ZeroField : public Error {
public:
  ZeroField() : Error("field is numerically zero") {}
};

// Q_n(t) = lambda (or Q_e(t) = lambda) has no positive solution.
class NoRoots : public Error {
public:
  using Error::Error;
};

class NonConvergence : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class InvariantViolation : public Error {
public:
  using Error::Error;
};

} // namespace choquard
