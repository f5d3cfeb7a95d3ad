#include "pob/phi_map.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <utility>
#include <vector>

namespace pob {

PhiMap PhiMap::linear(Mat m, double l_x) {
  const int d_x = static_cast<int>(m.rows());
  const int d_z = static_cast<int>(m.cols());
  const double sigma_max = Eigen::JacobiSVD<Mat>(m).singularValues()(0);
  PhiMap out(Kind::kLinear, d_x, d_z, sigma_max * l_x);
  out.coeffs_ = std::move(m);
  return out;
}

PhiMap PhiMap::random_linear(int d_x, int d_z, double l_x, double l_z_target, Rng& rng) {
  Mat m(d_x, d_z);
  for (int j = 0; j < d_z; ++j) m.col(j) = rng.normal_vec(d_x);
  const double sigma_max = Eigen::JacobiSVD<Mat>(m).singularValues()(0);
  m *= l_z_target / (sigma_max * l_x);
  PhiMap out(Kind::kLinear, d_x, d_z, l_z_target);
  out.coeffs_ = std::move(m);
  return out;
}

PhiMap PhiMap::polynomial(int d_x, int d_z, double box_half_width, double l_z_target, Rng& rng) {
  PhiMap out(Kind::kPolynomial, d_x, d_z, l_z_target);
  out.coeffs_ = Mat(d_x, d_z);
  out.center_ = Vec(d_z);
  out.scale_ = Vec(d_z);
  const double per_output = l_z_target / std::sqrt(static_cast<double>(d_z));
  for (int j = 0; j < d_z; ++j) {
    const Vec a = rng.sphere(d_x, 1.0);
    out.coeffs_.col(j) = a;
    // (a'x)^2 ranges over [0, (half_width * |a|_1)^2] on the box.
    const double peak = box_half_width * a.lpNorm<1>();
    out.center_[j] = 0.5 * peak * peak;
    out.scale_[j] = out.center_[j] / per_output;
  }
  return out;
}

PhiMap PhiMap::periodic(int d_x, int d_z, double l_z_target, Rng& rng) {
  PhiMap out(Kind::kPeriodic, d_x, d_z, l_z_target);
  out.coeffs_ = Mat::Zero(d_x, d_z);
  if (d_z <= d_x) {
    // Distinct random axes as projection directions.
    std::vector<int> axes(d_x);
    for (int i = 0; i < d_x; ++i) axes[i] = i;
    for (int i = d_x - 1; i > 0; --i) std::swap(axes[i], axes[rng.uniform_int(i + 1)]);
    for (int j = 0; j < d_z; ++j) out.coeffs_(axes[j], j) = 1.0;
  } else {
    for (int j = 0; j < d_z; ++j) out.coeffs_.col(j) = rng.sphere(d_x, 1.0);
  }
  out.amplitude_ = l_z_target / std::sqrt(static_cast<double>(d_z));
  return out;
}

PhiMap PhiMap::custom(std::function<Vec(const Vec&)> fn, int d_x, int d_z, double out_bound) {
  PhiMap out(Kind::kCustom, d_x, d_z, out_bound);
  out.fn_ = std::move(fn);
  return out;
}

Vec PhiMap::operator()(const Vec& x) const {
  if (x.size() != d_x_) {
    throw std::invalid_argument("phi: expected dimension " + std::to_string(d_x_) +
                                ", got " + std::to_string(x.size()));
  }
  switch (kind_) {
    case Kind::kLinear:
      return coeffs_.transpose() * x;
    case Kind::kPolynomial: {
      Vec out(d_z_);
      for (int j = 0; j < d_z_; ++j) {
        const double p = coeffs_.col(j).dot(x);
        out[j] = (p * p - center_[j]) / scale_[j];
      }
      return out;
    }
    case Kind::kPeriodic: {
      Vec out(d_z_);
      for (int j = 0; j < d_z_; ++j) out[j] = amplitude_ * std::sin(coeffs_.col(j).dot(x));
      return out;
    }
    case Kind::kCustom:
      return fn_(x);
  }
  throw std::logic_error("phi: unreachable");
}

const Mat& PhiMap::matrix() const {
  if (kind_ != Kind::kLinear) throw std::logic_error("phi: not a linear map");
  return coeffs_;
}

}  // namespace pob
