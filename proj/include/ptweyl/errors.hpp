#pragma once

#include <stdexcept>
#include <string>

namespace ptweyl {

// Bad input: malformed config, parameter outside its admissible domain,
// non-elliptic operator data. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A factorization or iteration failed to converge. Maps to exit code 2.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace ptweyl
