#pragma once

#include <stdexcept>
#include <string>

namespace rmtlab {

/// Base class of every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated (bad N, index out of range, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A dense LAPACK eigensolver or SVD did not converge.
class EigensolverError : public Error {
 public:
  EigensolverError(const std::string& routine, int info)
      : Error(routine + " failed with info=" + std::to_string(info)), info_(info) {}
  int info() const noexcept { return info_; }

 private:
  int info_;
};

/// A dense linear solve was singular.
class SolveError : public Error {
 public:
  using Error::Error;
};

/// A quadrature rule could not reach its tolerance within the refinement budget.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo experiment requested with too few trials / sizes.
class InsufficientTrials : public Error {
 public:
  using Error::Error;
};

/// Configuration document could not be parsed or validated.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what, int line = -1)
      : Error(format(field, what, line)), field_(field), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& field, const std::string& what, int line) {
    std::string out = "config error";
    if (line >= 0) out += " at line " + std::to_string(line);
    if (!field.empty()) out += " in field '" + field + "'";
    return out + ": " + what;
  }

  std::string field_;
  int line_;
};

}  // namespace rmtlab
