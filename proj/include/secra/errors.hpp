#pragma once

#include <stdexcept>

namespace secra {

// Invalid parameters or malformed input files. CLI exit code 2.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite values encountered during training or inference. CLI exit code 3.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace secra
