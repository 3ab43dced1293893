// Incremental least squares over an ordered active set of dictionary columns.
//
// The engine maintains the upper-triangular factor R of the active Gram
// matrix (Phi_A^T Phi_A = R^T R, equivalently the triangle of a thin QR of
// Phi_A) together with z = Q^T y. Columns are appended by extending R with a
// forward-substituted column and removed by a Givens sweep that restores the
// triangle, which avoids hyperbolic downdates. Residual-change queries use
// the identities
//   ||r_A||^2 - ||r_{A+i}||^2 = <phi_i, r_A>^2 / ||phi_i||_{R_A}^2
//   ||r_{A-i}||^2 - ||r_A||^2 = c_i^2 / [(Phi_A^T Phi_A)^{-1}]_ii
// evaluated from the factor, never from fresh solves.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sparse_pursuit/errors.hpp"
#include "sparse_pursuit/types.hpp"

namespace sparse_pursuit {

// Columns whose energetic norm falls below this are treated as lying in the
// span of the active set (columns are unit norm, so the scale is absolute).
inline constexpr double kSpanTol = 1e-10;

// Relative diagonal threshold for declaring the factor rank deficient.
inline constexpr double kRankTol = 1e-10;

// Refactorize from scratch when the diagonal has drifted this far, or after
// kMaxRemovalsBeforeRefresh removals, whichever comes first.
inline constexpr double kDiagDriftTol = 1e-8;
inline constexpr int kMaxRemovalsBeforeRefresh = 32;

namespace detail {

// Cholesky factor (upper triangular) of the Gram matrix of the given columns.
inline Matrix gram_factor(const Dictionary& dict, const std::vector<int>& indices) {
  const int k = static_cast<int>(indices.size());
  Matrix gram(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b)
      gram(a, b) = gram(b, a) = dict.col(indices[a]).dot(dict.col(indices[b]));

  Matrix factor = Matrix::Zero(k, k);
  double max_diag = 0.0;
  for (int j = 0; j < k; ++j) {
    double d = gram(j, j);
    for (int i = 0; i < j; ++i) d -= factor(i, j) * factor(i, j);
    d = d > 0.0 ? std::sqrt(d) : 0.0;
    max_diag = std::max(max_diag, d);
    if (d <= kRankTol * max_diag)
      throw RankDeficient("active columns are numerically rank deficient");
    factor(j, j) = d;
    for (int l = j + 1; l < k; ++l) {
      double v = gram(j, l);
      for (int i = 0; i < j; ++i) v -= factor(i, j) * factor(i, l);
      factor(j, l) = v / d;
    }
  }
  return factor;
}

}  // namespace detail

struct LsSolution {
  Vector coeffs;    // aligned with the index order passed in
  Vector residual;  // y - Phi_A coeffs
};

/**
 * Ordinary least squares on an explicit index set, solved through a fresh
 * Gram factorization. Throws RankDeficient when the smallest diagonal of the
 * factor falls below kRankTol times the largest, DuplicateIndex on repeats.
 */
inline LsSolution ls_solve(const Dictionary& dict, const std::vector<int>& indices,
                           const Vector& y) {
  for (std::size_t a = 0; a < indices.size(); ++a)
    for (std::size_t b = a + 1; b < indices.size(); ++b)
      if (indices[a] == indices[b]) throw DuplicateIndex("repeated index in ls_solve");

  const int k = static_cast<int>(indices.size());
  if (k == 0) return {Vector(0), y};

  const Matrix factor = detail::gram_factor(dict, indices);
  Vector rhs(k);
  for (int a = 0; a < k; ++a) rhs(a) = dict.col(indices[a]).dot(y);
  const Vector z = factor.transpose().triangularView<Eigen::Lower>().solve(rhs);
  const Vector coeffs = factor.triangularView<Eigen::Upper>().solve(z);

  Vector residual = y;
  for (int a = 0; a < k; ++a) residual -= coeffs(a) * dict.col(indices[a]);
  return {coeffs, residual};
}

/**
 * sqrt(v^T (I - Phi_A Phi_A^+) v): the energetic norm of v under the
 * least-squares residual projector of the columns indexed by A. Tiny
 * negative values from round-off are clamped to zero.
 */
inline double energetic_norm(const Dictionary& dict, const std::vector<int>& indices,
                             const Vector& v) {
  if (indices.empty()) return v.norm();
  const Matrix factor = detail::gram_factor(dict, indices);
  Vector rhs(static_cast<int>(indices.size()));
  for (std::size_t a = 0; a < indices.size(); ++a)
    rhs(static_cast<int>(a)) = dict.col(indices[a]).dot(v);
  const Vector w = factor.transpose().triangularView<Eigen::Lower>().solve(rhs);
  const double sq = v.squaredNorm() - w.squaredNorm();
  return sq > 0.0 ? std::sqrt(sq) : 0.0;
}

/**
 * Mutable least-squares model over an ordered active set. Single-owner
 * value semantics: copying yields an independent model, and no operation
 * touches shared state, so distinct instances are safe on distinct threads.
 */
class ActiveModel {
 public:
  ActiveModel(const Dictionary& dict, Vector y)
      : dict_(&dict), y_(std::move(y)), factor_(0, 0), qty_(0), coeffs_(0) {
    if (y_.size() != dict.rows()) throw BadArity("target length mismatch");
    residual_ = y_;
  }

  ActiveModel(const Dictionary& dict, Vector y, const std::vector<int>& initial)
      : ActiveModel(dict, std::move(y)) {
    for (int i : initial) add_column(i);
  }

  const Dictionary& dict() const { return *dict_; }
  const std::vector<int>& active() const { return active_; }
  int size() const { return static_cast<int>(active_.size()); }
  const Vector& target() const { return y_; }
  const Vector& residual() const { return residual_; }
  double residual_norm() const { return residual_.norm(); }
  const Vector& coeffs() const { return coeffs_; }

  bool is_active(int i) const {
    return std::find(active_.begin(), active_.end(), i) != active_.end();
  }

  int position(int i) const {
    const auto it = std::find(active_.begin(), active_.end(), i);
    if (it == active_.end()) throw NotActive("index is not in the active set");
    return static_cast<int>(it - active_.begin());
  }

  // ||phi_i||_{R_A} for an arbitrary vector; see the free energetic_norm.
  double energetic_norm(const Vector& v) const {
    if (size() == 0) return v.norm();
    const Vector w = solve_transposed(projections(v));
    const double sq = v.squaredNorm() - w.squaredNorm();
    return sq > 0.0 ? std::sqrt(sq) : 0.0;
  }

  // ||r_A||^2 - ||r_{A+i}||^2 for an inactive column. InSpan if the column's
  // energetic norm is below kSpanTol.
  double residual_decrease(int i) const {
    if (is_active(i)) throw DuplicateIndex("residual_decrease expects an inactive column");
    const Vector phi = dict_->col(i);
    double span_sq;
    if (size() == 0) {
      span_sq = phi.squaredNorm();
    } else {
      const Vector w = solve_transposed(projections(phi));
      span_sq = phi.squaredNorm() - w.squaredNorm();
    }
    if (!(span_sq > kSpanTol * kSpanTol))
      throw InSpan("column lies in the span of the active set");
    const double corr = phi.dot(residual_);
    return corr * corr / span_sq;
  }

  // ||r_{A-i}||^2 - ||r_A||^2 for an active column, from the factor alone.
  double residual_increase(int i) const {
    const int p = position(i);
    Vector e = Vector::Zero(size());
    e(p) = 1.0;
    const Vector u = solve_transposed(e);
    const double gram_inv_ii = u.squaredNorm();
    return coeffs_(p) * coeffs_(p) / gram_inv_ii;
  }

  void add_column(int i) {
    if (i < 0 || i >= dict_->cols()) throw BadArity("column index out of range");
    if (is_active(i)) throw DuplicateIndex("column already active");
    const Vector phi = dict_->col(i);
    const int k = size();

    Vector w(k);
    if (k > 0) w = solve_transposed(projections(phi));
    double d_sq = phi.squaredNorm() - (k > 0 ? w.squaredNorm() : 0.0);
    double d = d_sq > 0.0 ? std::sqrt(d_sq) : 0.0;
    const double max_diag =
        std::max(k > 0 ? factor_.diagonal().maxCoeff() : 0.0, d);
    if (d <= kRankTol * max_diag || d == 0.0)
      throw RankDeficient("adding this column makes the active set rank deficient");

    const double zeta = (phi.dot(y_) - (k > 0 ? w.dot(qty_) : 0.0)) / d;
    factor_.conservativeResize(k + 1, k + 1);
    if (k > 0) {
      factor_.col(k).head(k) = w;
      factor_.row(k).head(k).setZero();
    }
    factor_(k, k) = d;
    qty_.conservativeResize(k + 1);
    qty_(k) = zeta;
    active_.push_back(i);
    recompute_solution();
  }

  void remove_column(int i) {
    const int p = position(i);
    const int k = size();

    // Drop column p, then chase the subdiagonal with Givens rotations.
    for (int c = p; c < k - 1; ++c) factor_.col(c) = factor_.col(c + 1);
    for (int j = p; j < k - 1; ++j) {
      const double a = factor_(j, j);
      const double b = factor_(j + 1, j);
      const double r = std::hypot(a, b);
      if (r == 0.0) continue;
      const double c = a / r;
      const double s = b / r;
      for (int col = j; col < k - 1; ++col) {
        const double top = factor_(j, col);
        const double bot = factor_(j + 1, col);
        factor_(j, col) = c * top + s * bot;
        factor_(j + 1, col) = -s * top + c * bot;
      }
      const double zt = qty_(j);
      const double zb = qty_(j + 1);
      qty_(j) = c * zt + s * zb;
      qty_(j + 1) = -s * zt + c * zb;
    }
    factor_.conservativeResize(k - 1, k - 1);
    qty_.conservativeResize(k - 1);
    active_.erase(active_.begin() + p);
    ++removals_;

    if (needs_refresh()) refactorize();
    recompute_solution();
  }

  // Rebuild the factor from scratch; bounds drift from long add/remove runs.
  void refactorize() {
    if (active_.empty()) {
      factor_.resize(0, 0);
      qty_.resize(0);
    } else {
      factor_ = detail::gram_factor(*dict_, active_);
      Vector rhs(size());
      for (int a = 0; a < size(); ++a) rhs(a) = dict_->col(active_[a]).dot(y_);
      qty_ = solve_transposed(rhs);
    }
    removals_ = 0;
    recompute_solution();
  }

 private:
  Vector projections(const Vector& v) const {
    Vector out(size());
    for (int a = 0; a < size(); ++a) out(a) = dict_->col(active_[a]).dot(v);
    return out;
  }

  Vector solve_transposed(const Vector& rhs) const {
    return factor_.transpose().triangularView<Eigen::Lower>().solve(rhs);
  }

  bool needs_refresh() const {
    if (size() == 0) return false;
    if (removals_ > kMaxRemovalsBeforeRefresh) return true;
    const double max_diag = factor_.diagonal().maxCoeff();
    const double min_diag = factor_.diagonal().minCoeff();
    return min_diag < kDiagDriftTol * max_diag;
  }

  void recompute_solution() {
    if (active_.empty()) {
      coeffs_.resize(0);
      residual_ = y_;
      return;
    }
    coeffs_ = factor_.triangularView<Eigen::Upper>().solve(qty_);
    residual_ = y_;
    for (int a = 0; a < size(); ++a)
      residual_ -= coeffs_(a) * dict_->col(active_[a]);
  }

  const Dictionary* dict_;
  Vector y_;
  std::vector<int> active_;
  Matrix factor_;  // upper triangular, Phi_A^T Phi_A = factor^T factor
  Vector qty_;     // z = Q^T y for the thin QR Phi_A = Q * factor
  Vector coeffs_;
  Vector residual_;
  int removals_ = 0;
};

}  // namespace sparse_pursuit
