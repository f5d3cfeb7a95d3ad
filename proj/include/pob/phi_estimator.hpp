#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "pob/ridge.hpp"
#include "pob/types.hpp"

namespace pob {

/// Deterministic expansion applied to the pre-serving context before the
/// linear fit, so that e.g. quadratic ground truths become linear in features.
struct FeatureMap {
  enum class Kind { kIdentity, kSquare, kQuadratic, kSine };

  Kind kind = Kind::kIdentity;

  [[nodiscard]] Vec apply(const Vec& x) const;
  [[nodiscard]] int out_dim(int d_x) const;
  /// Bound on |apply(x)| given |x| <= l_x in dimension d_x.
  [[nodiscard]] double out_bound(double l_x, int d_x) const;

  static FeatureMap identity() { return {Kind::kIdentity}; }
  /// x -> (x, x .* x): appends elementwise squares.
  static FeatureMap square() { return {Kind::kSquare}; }
  /// x -> (1, x, x_i * x_j for i <= j): spans any quadratic form.
  static FeatureMap quadratic() { return {Kind::kQuadratic}; }
  /// x -> (x, sin(x_i)): spans axis-aligned sinusoids.
  static FeatureMap sine() { return {Kind::kSine}; }
};

/// Abstract estimate of the post-serving map: a point prediction plus a
/// high-probability radius around it. One instance per run; prediction is
/// safe to share once updates stop.
class PhiModel {
 public:
  virtual ~PhiModel() = default;
  [[nodiscard]] virtual Vec predict(const Vec& x) const = 0;
  [[nodiscard]] virtual double radius(const Vec& x, double delta) const = 0;
  virtual void update(const Vec& x, const Vec& z) = 0;
  [[nodiscard]] virtual long count() const = 0;
  [[nodiscard]] virtual std::unique_ptr<PhiModel> clone() const = 0;
};

/// Generic error profile: radius = c0 * min(1, q)^alpha * log(max(t,2)/delta)
/// where q is the squared inverse-gram norm of the query. Covers estimators
/// whose convergence exponent alpha in (0, 1/2] is known but whose internals
/// are not modeled.
struct ErrorModel {
  double c0 = 1.0;
  double alpha = 0.5;

  ErrorModel() = default;
  ErrorModel(double c0_in, double alpha_in);

  [[nodiscard]] double radius(double x_norm_sq, double t, double delta) const;
};

struct LinearPhiConfig {
  double lambda = 1.0;              // ridge regularizer for the feature gram
  double l_phi = 0.0;               // column-norm bound; 0 -> sqrt(d_z)
  double r_eps = 0.0;               // sub-Gaussian scale of the z noise
  double l_x = 1.0;                 // norm bound on raw contexts
  FeatureMap features;              // expansion applied before the fit
  std::optional<ErrorModel> generic;  // overrides the radius when set
};

/// Ridge regression of the post-serving context on (expanded) pre-serving
/// features: one shared gram over features, one moment column per output
/// coordinate. Prediction is linear in the query.
class LinearPhiEstimator : public PhiModel {
 public:
  LinearPhiEstimator(int d_x, int d_z, LinearPhiConfig cfg);

  [[nodiscard]] Vec predict(const Vec& x) const override;

  /// High-probability bound on |predict(x) - phi(x)|_2. For the default
  /// linear profile:
  ///   (sqrt(lambda)*l_phi + r_eps*sqrt(d_f*log((1+t*l_f^2/lambda)/(delta/d_z))))
  ///     * sqrt(d_z) * |f(x)|_{G^-1}
  /// with f the feature expansion and G the feature gram.
  [[nodiscard]] double radius(const Vec& x, double delta) const override;

  void update(const Vec& x, const Vec& z) override;
  [[nodiscard]] long count() const override { return gram_.count(); }
  [[nodiscard]] std::unique_ptr<PhiModel> clone() const override;

  /// Fitted coefficient matrix (features x d_z).
  [[nodiscard]] Mat coefficients() const;
  [[nodiscard]] int d_z() const { return d_z_; }

 private:
  int d_x_;
  int d_z_;
  int d_feat_;
  LinearPhiConfig cfg_;
  double l_feat_;
  RidgeState gram_;   // moment side unused; carries the shared factorization
  Mat moments_;       // d_feat x d_z
};

/// Oracle estimator wrapping a known map: exact predictions, zero radius.
/// Used by tests and by runs that grant the policy the true phi.
class ExactPhi : public PhiModel {
 public:
  ExactPhi(std::function<Vec(const Vec&)> fn, int d_z)
      : fn_(std::move(fn)), d_z_(d_z) {}

  [[nodiscard]] Vec predict(const Vec& x) const override { return fn_(x); }
  [[nodiscard]] double radius(const Vec&, double) const override { return 0.0; }
  void update(const Vec&, const Vec&) override { ++count_; }
  [[nodiscard]] long count() const override { return count_; }
  [[nodiscard]] std::unique_ptr<PhiModel> clone() const override {
    return std::make_unique<ExactPhi>(fn_, d_z_);
  }

 private:
  std::function<Vec(const Vec&)> fn_;
  int d_z_;
  long count_ = 0;
};

}  // namespace pob
