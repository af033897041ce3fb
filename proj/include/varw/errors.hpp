#pragma once

#include <stdexcept>
#include <string>

namespace varw {

/// Bad input: malformed model, dimension mismatch, violated model invariant.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A runtime guard tripped (iteration cap, step cap, non-convergence).
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exact identity that must hold on every run did not.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Strict injected stacks were queried past their explicit prefix.
class StackExhausted : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace varw
