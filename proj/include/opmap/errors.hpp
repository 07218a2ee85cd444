#pragma once

#include <stdexcept>
#include <string>

namespace opmap {

// Thrown for inputs that violate an operation's preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ShapeMismatch : public InputError {
 public:
  using InputError::InputError;
};

// A map was built with claimed properties that its spot checks refuted.
class RegistrationError : public InputError {
 public:
  using InputError::InputError;
};

// A theorem precondition (flag, normality, unitality) does not hold.
class PreconditionError : public InputError {
 public:
  using InputError::InputError;
};

// Numerical procedure could not produce a trustworthy answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace opmap
