#ifndef QCMOD_ERRORS_HPP
#define QCMOD_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcmod {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite entries, non-unit directions, coincident base points.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Bad parameters for a constructor or gallery entry (radii, exponents, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A point outside the domain of a map, grid or curve family.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Failure of a numerical sub-step (evaluation, stencil, iteration).
class NumericError : public Error {
 public:
  using Error::Error;
};

// A value that does not exist, e.g. a fiber sum over an empty fiber.
class UndefinedValue : public Error {
 public:
  using Error::Error;
};

// Beltrami coefficient with |mu| >= 1.
class DegenerateMap : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  SingularMatrix(const std::string& what, double abs_det)
      : Error(what + " (|det| = " + std::to_string(abs_det) + ")"),
        abs_det_(abs_det) {}

  double abs_det() const noexcept { return abs_det_; }

 private:
  double abs_det_;
};

}  // namespace qcmod

#endif  // QCMOD_ERRORS_HPP
