#pragma once

#include <stdexcept>
#include <string>

namespace rwdre {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments: empty arrow sets, probabilities that do not sum to one,
// parameters outside their open interval, unknown model names.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A series or iteration failed to converge within its budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

// The requested operation has no implementation for this model
// (no closed form, no renewal structure, no enumeration oracle).
class Unsupported : public Error {
 public:
  using Error::Error;
};

}  // namespace rwdre
