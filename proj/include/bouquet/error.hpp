#pragma once

#include <stdexcept>
#include <string>

namespace bouquet {

/// Argument outside the domain of an operation (e.g. lambda not in (0, 1/e)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Point lies on the cut ray where no inverse branch is defined.
class CutError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// An iterative numerical method did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A combinatorial size (state count, word count) exceeds the configured cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input (itinerary strings, configs).
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace bouquet
