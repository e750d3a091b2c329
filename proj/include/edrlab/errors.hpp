#pragma once

#include <stdexcept>
#include <string>

namespace edrlab {

// Argument outside the domain of a model function (e.g. a <= -2 for the
// error-free family, non-finite couplings).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Moments that do not describe a physical state.
class StateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Wavefunction grid cannot represent the requested state at the required
// fidelity.
class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a divergence witness is requested for a quantity whose
// closed form does not depend on the input state.
class NotDivergent : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed command-line model or state specification.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace edrlab
