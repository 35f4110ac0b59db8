#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fstress {

// Root of the library's error hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point fell outside the domain of the function being evaluated
// (e.g. log of a non-positive squared distance, or a fractional power of a
// negative value).  When the failure happened while processing a specific
// point pair the 1-based pair indices are attached.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
  DomainError(const std::string& what, std::size_t u, std::size_t v)
      : Error(what), u_(u), v_(v) {}

  bool has_pair() const { return u_ != 0; }
  std::size_t pair_u() const { return u_; }
  std::size_t pair_v() const { return v_; }

 private:
  std::size_t u_ = 0;
  std::size_t v_ = 0;
};

// Sizes of two related objects disagree (coordinate vector vs. n*p, weight
// vector vs. pair count, ...).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A point, axis or pair index is out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Input text (JSON instance, CSV matrix, command line) could not be parsed
// or failed validation.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A numeric procedure produced an invalid value or could not proceed.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// An inf or NaN appeared where a finite number was required.
class NonFiniteError : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

}  // namespace fstress
