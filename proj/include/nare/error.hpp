#pragma once

#include <stdexcept>
#include <string>

namespace nare {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pivot of a direct factorization fell below the relative cutoff.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// The Sylvester operator X -> PX + XQ is numerically singular.
class SylvesterSingular : public Error {
 public:
  using Error::Error;
};

/// The shifted QR iteration did not deflate within its sweep budget.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// Some row of Q has omega-projected diagonal not exceeding its
/// off-diagonal absolute row sum.
class MarginViolation : public Error {
 public:
  MarginViolation(const std::string& what, long row) : Error(what), row_(row) {}
  long row() const { return row_; }

 private:
  long row_;
};

/// A rotation angle at which some per-row objective is undefined.
class Infeasible : public Error {
 public:
  using Error::Error;
};

class RotationInfeasible : public Error {
 public:
  using Error::Error;
};

class BracketInvalid : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied parameter or malformed problem data.
class BadParam : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nare
