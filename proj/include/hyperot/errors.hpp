#ifndef HYPEROT_ERRORS_HPP
#define HYPEROT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hyperot {

// Mismatched shapes, incompatible balls, bad indices.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Singular covariances, degenerate couplings, failed line searches.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable/unwritable files, malformed file contents.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user-facing options (unknown method, invalid flag combination).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace hyperot

#endif  // HYPEROT_ERRORS_HPP
