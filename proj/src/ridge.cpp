#include "pob/ridge.hpp"

#include <cmath>
#include <string>

namespace pob {

RidgeState::RidgeState(int dim, double reg) : dim_(dim), reg_(reg) {
  if (dim <= 0) {
    throw std::invalid_argument("ridge: dimension must be positive, got " +
                                std::to_string(dim));
  }
  if (!(reg > 0.0)) {
    throw std::invalid_argument("ridge: regularizer must be positive, got " +
                                std::to_string(reg));
  }
  gram_ = reg * Mat::Identity(dim, dim);
  moment_ = Vec::Zero(dim);
  chol_.compute(gram_);
}

void RidgeState::check_dim(const Vec& u, const char* op) const {
  if (u.size() != dim_) {
    throw std::invalid_argument(std::string(op) + ": expected dimension " +
                                std::to_string(dim_) + ", got " +
                                std::to_string(u.size()));
  }
}

void RidgeState::update(const Vec& u, double reward) {
  check_dim(u, "ridge update");
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(u);
  gram_.triangularView<Eigen::StrictlyUpper>() =
      gram_.triangularView<Eigen::StrictlyLower>().transpose();
  moment_ += reward * u;
  ++count_;
  if (++since_refactor_ >= kRefactorInterval) {
    chol_.compute(gram_);
    since_refactor_ = 0;
  } else {
    chol_.rankUpdate(u, 1.0);
  }
  if (chol_.info() != Eigen::Success) {
    // Cannot happen while the regularizer keeps the gram positive definite.
    throw std::logic_error("ridge: factorization lost positive definiteness");
  }
}

Vec RidgeState::solve() const { return chol_.solve(moment_); }

Vec RidgeState::solve_system(const Vec& rhs) const {
  check_dim(rhs, "ridge solve");
  return chol_.solve(rhs);
}

double RidgeState::inv_norm(const Vec& u) const {
  check_dim(u, "inv_norm");
  // u' A^{-1} u = |L^{-1} u|^2 with A = L L'.
  return chol_.matrixL().solve(u).norm();
}

double RidgeState::log_det_ratio() const {
  double log_det = 0.0;
  const auto& l = chol_.matrixLLT();
  for (int i = 0; i < dim_; ++i) log_det += std::log(l(i, i));
  const double ratio = 2.0 * log_det - dim_ * std::log(reg_);
  return ratio > 0.0 ? ratio : 0.0;
}

}  // namespace pob
