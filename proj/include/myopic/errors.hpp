#pragma once

#include <stdexcept>
#include <string>

namespace myopic {

// Caller supplied a value outside the documented domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A formula is evaluated where its geometry collapses (zero denominator,
// log of a nonpositive number, strip past the pole).
class DegenerateGeometry : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Codebook or workload would exceed the configured memory budget.
class SizingError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace myopic
