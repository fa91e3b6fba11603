#pragma once

#include <stdexcept>
#include <string>

namespace sympt {

/// Caller supplied an argument outside the operation's domain.
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A line search along a direction found no eigenvalue crossing.
class degenerate_direction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An invariant that must hold mathematically was violated numerically.
class internal_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sympt
