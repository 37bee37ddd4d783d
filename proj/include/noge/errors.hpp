#pragma once

#include <stdexcept>

namespace noge {

// Bad input data (malformed files, OOV tokens, inconsistent artifacts).
// The CLI maps this to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad command line / configuration. Exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric failure at runtime (divergence, degenerate inputs). Exit code 1.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File I/O failure. Exit code 1.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Broken internal invariant; indicates a bug, not bad user input. Exit code 1.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace noge
