#pragma once

#include <Eigen/Cholesky>

#include "pob/types.hpp"

namespace pob {

/// Regularized least-squares accumulator: maintains the design matrix
/// A = lambda*I + sum u_s u_s', the moment vector b = sum r_s u_s, and a
/// Cholesky factor of A updated one observation at a time. The factor is
/// rebuilt from the exact gram every 256 updates to bound roundoff drift.
///
/// A stays symmetric positive definite with smallest eigenvalue >= lambda,
/// so every solve below is well posed.
class RidgeState {
 public:
  RidgeState(int dim, double reg);

  /// Absorbs one observation: A += u u', b += reward * u.
  void update(const Vec& u, double reward);

  /// Least-squares estimate A^{-1} b; the zero vector before any update.
  [[nodiscard]] Vec solve() const;

  /// Solves A y = rhs for an arbitrary right-hand side.
  [[nodiscard]] Vec solve_system(const Vec& rhs) const;

  /// sqrt(u' A^{-1} u), computed through the Cholesky factor. Never negative;
  /// at most |u| / sqrt(lambda).
  [[nodiscard]] double inv_norm(const Vec& u) const;

  /// log det(A) - dim * log(lambda); zero before any update, nonnegative always.
  [[nodiscard]] double log_det_ratio() const;

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] double reg() const { return reg_; }
  [[nodiscard]] long count() const { return count_; }
  [[nodiscard]] const Mat& gram() const { return gram_; }
  [[nodiscard]] const Vec& moment() const { return moment_; }

 private:
  void check_dim(const Vec& u, const char* op) const;

  static constexpr int kRefactorInterval = 256;

  int dim_;
  double reg_;
  long count_ = 0;
  int since_refactor_ = 0;
  Mat gram_;
  Vec moment_;
  Eigen::LLT<Mat> chol_;
};

}  // namespace pob
