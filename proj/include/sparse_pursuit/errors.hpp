// Error types shared across the library. Hard failures are exceptions;
// recoverable conditions (e.g. a solver hitting its iteration budget) are
// reported through result flags instead.

#pragma once

#include <stdexcept>
#include <string>

namespace sparse_pursuit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The active submatrix lost (or never had) full column rank.
struct RankDeficient : Error {
  using Error::Error;
};

// Attempt to add an index that is already active.
struct DuplicateIndex : Error {
  using Error::Error;
};

// Attempt to query/remove an index that is not active.
struct NotActive : Error {
  using Error::Error;
};

// A candidate column lies in the span of the active set.
struct InSpan : Error {
  using Error::Error;
};

// Backward regression requires a determined system (m <= n).
struct NotDetermined : Error {
  using Error::Error;
};

// Argument outside its documented domain.
struct BadArity : Error {
  using Error::Error;
};

// Malformed input data (datasets, matrix files).
struct DataFormat : Error {
  using Error::Error;
};

// A factorization failed even after a full recompute.
struct NumericalFailure : Error {
  using Error::Error;
};

// An operation that requires unit-norm columns got an unnormalized dictionary.
struct NotNormalized : Error {
  using Error::Error;
};

}  // namespace sparse_pursuit
