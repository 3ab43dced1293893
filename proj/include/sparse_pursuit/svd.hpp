// Smallest singular value of a dense matrix.

#pragma once

#include <Eigen/SVD>

#include "sparse_pursuit/errors.hpp"
#include "sparse_pursuit/types.hpp"

namespace sparse_pursuit {

inline double min_singular_value(const Matrix& m) {
  if (m.size() == 0) throw BadArity("empty matrix");
  if (!m.allFinite()) throw BadArity("matrix entries must be finite");
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().tail(1)(0);
}

}  // namespace sparse_pursuit
