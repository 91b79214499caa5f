#pragma once

#include <stdexcept>

namespace ztps {

// Ill-formed files, mismatched headers, malformed trees. CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hard numerical failures the fit pipeline cannot absorb. CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ztps
