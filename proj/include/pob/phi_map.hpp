#pragma once

#include <functional>

#include "pob/rng.hpp"
#include "pob/types.hpp"

namespace pob {

/// Ground-truth map from a pre-serving context to the mean post-serving
/// context. Every family certifies an output bound: |phi(x)|_2 <= out_bound()
/// for all x with |x| within the context support used at construction.
class PhiMap {
 public:
  /// phi(x) = M' x. The bound is sigma_max(M) * l_x.
  static PhiMap linear(Mat m, double l_x);

  /// Random linear map whose coefficients are scaled so the output bound
  /// equals l_z_target over inputs with |x| <= l_x.
  static PhiMap random_linear(int d_x, int d_z, double l_x, double l_z_target, Rng& rng);

  /// phi_j(x) = ((a_j' x)^2 - c) / s_j with random unit directions a_j;
  /// c and s_j center each output on zero and cap it at l_z_target / sqrt(d_z)
  /// over the box [-half_width, half_width]^{d_x}.
  static PhiMap polynomial(int d_x, int d_z, double box_half_width, double l_z_target, Rng& rng);

  /// phi_j(x) = l_z_target * sin(a_j' x) / sqrt(d_z), bounded by construction.
  static PhiMap periodic(int d_x, int d_z, double l_z_target, Rng& rng);

  /// Externally supplied map with a caller-certified output bound.
  static PhiMap custom(std::function<Vec(const Vec&)> fn, int d_x, int d_z, double out_bound);

  [[nodiscard]] Vec operator()(const Vec& x) const;

  [[nodiscard]] int in_dim() const { return d_x_; }
  [[nodiscard]] int out_dim() const { return d_z_; }
  [[nodiscard]] double out_bound() const { return out_bound_; }

  /// For linear maps, the coefficient matrix; throws otherwise.
  [[nodiscard]] const Mat& matrix() const;
  [[nodiscard]] bool is_linear() const { return kind_ == Kind::kLinear; }

 private:
  enum class Kind { kLinear, kPolynomial, kPeriodic, kCustom };

  PhiMap(Kind kind, int d_x, int d_z, double bound) : kind_(kind), d_x_(d_x), d_z_(d_z), out_bound_(bound) {}

  Kind kind_;
  int d_x_;
  int d_z_;
  double out_bound_;
  Mat coeffs_;        // linear: d_x x d_z; polynomial/periodic: columns a_j
  Vec center_;        // polynomial: per-output c
  Vec scale_;         // polynomial: per-output s_j
  double amplitude_ = 0.0;  // periodic
  std::function<Vec(const Vec&)> fn_;
};

}  // namespace pob
