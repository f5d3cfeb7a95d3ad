#include "pob/phi_estimator.hpp"

#include <cmath>

namespace pob {

Vec FeatureMap::apply(const Vec& x) const {
  const int d = static_cast<int>(x.size());
  switch (kind) {
    case Kind::kIdentity:
      return x;
    case Kind::kSquare: {
      Vec out(2 * d);
      out.head(d) = x;
      out.tail(d) = x.array().square();
      return out;
    }
    case Kind::kQuadratic: {
      Vec out(out_dim(d));
      out[0] = 1.0;
      out.segment(1, d) = x;
      int k = 1 + d;
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) out[k++] = x[i] * x[j];
      }
      return out;
    }
    case Kind::kSine: {
      Vec out(2 * d);
      out.head(d) = x;
      out.tail(d) = x.array().sin();
      return out;
    }
  }
  throw std::logic_error("feature map: unreachable");
}

int FeatureMap::out_dim(int d_x) const {
  switch (kind) {
    case Kind::kIdentity:
      return d_x;
    case Kind::kSquare:
    case Kind::kSine:
      return 2 * d_x;
    case Kind::kQuadratic:
      return 1 + d_x + d_x * (d_x + 1) / 2;
  }
  throw std::logic_error("feature map: unreachable");
}

double FeatureMap::out_bound(double l_x, int d_x) const {
  const double sq = l_x * l_x;
  switch (kind) {
    case Kind::kIdentity:
      return l_x;
    case Kind::kSquare:
      // sum x_i^2 + sum x_i^4 <= |x|^2 + |x|^4.
      return std::sqrt(sq + sq * sq);
    case Kind::kQuadratic:
      // sum over i<=j of (x_i x_j)^2 <= (sum x_i^2)^2.
      return std::sqrt(1.0 + sq + sq * sq);
    case Kind::kSine:
      return std::sqrt(sq + d_x);
  }
  throw std::logic_error("feature map: unreachable");
}

ErrorModel::ErrorModel(double c0_in, double alpha_in) : c0(c0_in), alpha(alpha_in) {
  if (!(c0 > 0.0)) throw std::invalid_argument("error model: c0 must be positive");
  if (!(alpha > 0.0) || alpha > 0.5) {
    throw std::invalid_argument("error model: alpha must lie in (0, 1/2]");
  }
}

double ErrorModel::radius(double x_norm_sq, double t, double delta) const {
  if (!(delta > 0.0) || delta >= 1.0) {
    throw std::invalid_argument("error model: delta must lie in (0, 1)");
  }
  const double clamped = std::min(1.0, x_norm_sq);
  return c0 * std::pow(clamped, alpha) * std::log(std::max(t, 2.0) / delta);
}

LinearPhiEstimator::LinearPhiEstimator(int d_x, int d_z, LinearPhiConfig cfg)
    : d_x_(d_x),
      d_z_(d_z),
      d_feat_(cfg.features.out_dim(d_x)),
      cfg_(cfg),
      l_feat_(cfg.features.out_bound(cfg.l_x, d_x)),
      gram_(d_feat_, cfg.lambda),
      moments_(Mat::Zero(d_feat_, d_z)) {
  if (d_z <= 0) throw std::invalid_argument("phi estimator: d_z must be positive");
  if (cfg_.l_phi <= 0.0) cfg_.l_phi = std::sqrt(static_cast<double>(d_z));
}

Vec LinearPhiEstimator::predict(const Vec& x) const {
  const Vec f = cfg_.features.apply(x);
  return moments_.transpose() * gram_.solve_system(f);
}

double LinearPhiEstimator::radius(const Vec& x, double delta) const {
  if (!(delta > 0.0) || delta >= 1.0) {
    throw std::invalid_argument("phi estimator: delta must lie in (0, 1)");
  }
  const Vec f = cfg_.features.apply(x);
  const double q = gram_.inv_norm(f);
  if (cfg_.generic) {
    return cfg_.generic->radius(q * q, static_cast<double>(count()), delta);
  }
  const double t = static_cast<double>(count());
  const double per_coord_delta = delta / static_cast<double>(d_z_);
  const double log_term =
      std::log((1.0 + t * l_feat_ * l_feat_ / cfg_.lambda) / per_coord_delta);
  const double column_radius = std::sqrt(cfg_.lambda) * cfg_.l_phi +
                               cfg_.r_eps * std::sqrt(d_feat_ * log_term);
  return column_radius * std::sqrt(static_cast<double>(d_z_)) * q;
}

void LinearPhiEstimator::update(const Vec& x, const Vec& z) {
  if (z.size() != d_z_) {
    throw std::invalid_argument("phi update: expected z dimension " + std::to_string(d_z_) +
                                ", got " + std::to_string(z.size()));
  }
  const Vec f = cfg_.features.apply(x);
  gram_.update(f, 0.0);
  moments_ += f * z.transpose();
}

std::unique_ptr<PhiModel> LinearPhiEstimator::clone() const {
  return std::make_unique<LinearPhiEstimator>(*this);
}

Mat LinearPhiEstimator::coefficients() const {
  Mat out(d_feat_, d_z_);
  for (int j = 0; j < d_z_; ++j) out.col(j) = gram_.solve_system(moments_.col(j));
  return out;
}

}  // namespace pob
