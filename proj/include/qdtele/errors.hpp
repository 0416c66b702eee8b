#pragma once

#include <stdexcept>
#include <string>

namespace qdtele {

// Invalid argument or violated precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument is well formed but outside the domain of a closed-form expression.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The configuration heralds with zero probability.
class DegenerateConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tomography counts cannot be inverted.
class ReconstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool cond, const std::string& what) {
  if (!cond) throw InputError(what);
}
}  // namespace detail

}  // namespace qdtele
