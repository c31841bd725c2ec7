#pragma once

#include <stdexcept>
#include <string>

namespace bose {

// Parameters outside the admissible domain (mu >= 0 for a model that needs
// mu < 0, negative volume, ...). Maps to CLI exit code 2.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A series, cutoff or finite-difference stencil failed to reach the requested
// accuracy. Maps to CLI exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mode count or Fock dimension over the configured ceiling. Exit code 3.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_negative_mu(double mu, const char* where) {
  if (!(mu < 0.0)) {
    throw DomainError(std::string(where) + ": outside stability domain (mu must be < 0)");
  }
}

inline void require_positive(double value, const char* name, const char* where) {
  if (!(value > 0.0)) {
    throw DomainError(std::string(where) + ": " + name + " must be > 0");
  }
}

}  // namespace bose
