// Core value types: dense matrix/vector aliases and the Dictionary wrapper.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "sparse_pursuit/errors.hpp"

namespace sparse_pursuit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kUnitNormTol = 1e-12;

/**
 * A design matrix whose columns are the features (atoms) available to the
 * selection algorithms. Immutable after construction, so it can be shared
 * freely across concurrent trial workers.
 */
class Dictionary {
 public:
  Dictionary() = default;

  // Takes the matrix as-is; `normalized` is checked, not enforced.
  explicit Dictionary(Matrix data) : data_(std::move(data)) {
    validate();
    normalized_ = check_unit_columns();
  }

  // Rescales every column to unit Euclidean norm.
  static Dictionary normalized(Matrix data) {
    Dictionary d;
    d.data_ = std::move(data);
    d.validate();
    for (Eigen::Index j = 0; j < d.data_.cols(); ++j) {
      const double norm = d.data_.col(j).norm();
      if (norm <= 0.0) throw BadArity("cannot normalize a zero column");
      d.data_.col(j) /= norm;
    }
    d.normalized_ = true;
    return d;
  }

  const Matrix& data() const { return data_; }
  Eigen::Index rows() const { return data_.rows(); }
  Eigen::Index cols() const { return data_.cols(); }
  auto col(int i) const { return data_.col(i); }
  bool is_normalized() const { return normalized_; }

 private:
  void validate() const {
    if (data_.rows() < 1 || data_.cols() < 1)
      throw BadArity("dictionary must have at least one row and one column");
    if (!data_.allFinite()) throw BadArity("dictionary entries must be finite");
  }

  bool check_unit_columns() const {
    for (Eigen::Index j = 0; j < data_.cols(); ++j)
      if (std::abs(data_.col(j).norm() - 1.0) > kUnitNormTol) return false;
    return true;
  }

  Matrix data_;
  bool normalized_ = false;
};

inline void require_normalized(const Dictionary& dict) {
  if (!dict.is_normalized())
    throw NotNormalized("operation requires unit-norm dictionary columns");
}

inline std::vector<int> sorted_copy(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace sparse_pursuit
