#pragma once

#include <stdexcept>

namespace quatkmp {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Log/exp map evaluated outside its admissible domain (antipode, |z| >= pi).
class DomainError : public Error {
public:
  using Error::Error;
};

// Demonstrations cannot be brought into a common hemisphere by sign flips.
class AlignmentError : public Error {
public:
  using Error::Error;
};

// Mixture estimation failed (component collapse, non-PD covariance).
class FitError : public Error {
public:
  using Error::Error;
};

// Conditioning produced a non-finite result.
class ConditionError : public Error {
public:
  using Error::Error;
};

// Regularized Gram system is numerically singular.
class SolveError : public Error {
public:
  using Error::Error;
};

// Kernel/layout incompatible with the given inputs.
class LayoutError : public Error {
public:
  using Error::Error;
};

class DimError : public Error {
public:
  using Error::Error;
};

class LengthError : public Error {
public:
  using Error::Error;
};

}  // namespace quatkmp
