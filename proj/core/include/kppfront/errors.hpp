#pragma once

#include <stdexcept>
#include <string>

namespace kppfront {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class ToleranceUnreachable : public Error {
public:
  using Error::Error;
};

// Raised when a lattice coefficient comes out non-integral; never expected.
class NotInLattice : public Error {
public:
  using Error::Error;
};

class NoConvergence : public Error {
public:
  using Error::Error;
};

class BracketFailure : public Error {
public:
  using Error::Error;
};

class NoRoot : public Error {
public:
  using Error::Error;
};

class NotSupercritical : public Error {
public:
  using Error::Error;
};

class SandwichViolation : public Error {
public:
  SandwichViolation(const std::string& what, double excursion)
      : Error(what), excursion(excursion) {}
  double excursion;
};

class DomainTooSmall : public Error {
public:
  DomainTooSmall(const std::string& what, double right_end, double left_end)
      : Error(what), right_end(right_end), left_end(left_end) {}
  double right_end;
  double left_end;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace kppfront
