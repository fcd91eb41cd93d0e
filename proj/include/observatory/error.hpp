#pragma once

#include <stdexcept>
#include <string>

namespace observatory {

// Malformed or invalid input (tables, embedding files, plans, CLI arguments).
// Maps to exit code 2 at the command line.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A measure could not be evaluated on otherwise valid input (zero-norm vector,
// degenerate mean, constant rank variable, ...). Maps to exit code 3.
class MeasureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace observatory
