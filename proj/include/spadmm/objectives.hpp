#pragma once

#include <cmath>
#include <memory>
#include <string>

#include "spadmm/error.hpp"
#include "spadmm/linalg.hpp"
#include "spadmm/problem.hpp"

namespace spadmm {

// f(x, y) = (qx/2) x² + b·x·y − (qy/2) y² + cx·x + cy·y  on scalar blocks,
// with qx, qy >= 0 so f is convex-concave.
class BilinearQuadratic final : public BlockObjective {
 public:
  BilinearQuadratic(double qx, double b, double qy, double cx = 0.0, double cy = 0.0)
      : qx_(qx), b_(b), qy_(qy), cx_(cx), cy_(cy) {
    if (!(qx >= 0.0) || !(qy >= 0.0)) throw ArgumentError("bilinear-quadratic: qx and qy must be >= 0");
  }

  BlockDims dims() const override { return {1, 1}; }
  ObjectiveKind kind() const override { return ObjectiveKind::BilinearQuadratic; }
  std::string type() const override { return "bilinear-quadratic"; }

  double value(const Vector& x, const Vector& y) const override {
    const double u = x[0], v = y[0];
    return 0.5 * qx_ * u * u + b_ * u * v - 0.5 * qy_ * v * v + cx_ * u + cy_ * v;
  }
  void gradient(const Vector& x, const Vector& y, Vector& gx, Vector& gy) const override {
    gx[0] = qx_ * x[0] + b_ * y[0] + cx_;
    gy[0] = b_ * x[0] - qy_ * y[0] + cy_;
  }

  double qx() const { return qx_; }
  double b() const { return b_; }
  double qy() const { return qy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }

 private:
  double qx_, b_, qy_, cx_, cy_;
};

// Channel capacity log(1 + y / (sigma + x)): noise power x, signal power y.
class PowerCapacity final : public BlockObjective {
 public:
  explicit PowerCapacity(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ArgumentError("power-capacity: sigma must be positive");
  }

  BlockDims dims() const override { return {1, 1}; }
  ObjectiveKind kind() const override { return ObjectiveKind::SmoothGeneral; }
  std::string type() const override { return "power-capacity"; }

  double value(const Vector& x, const Vector& y) const override {
    return std::log1p(y[0] / (sigma_ + x[0]));
  }
  void gradient(const Vector& x, const Vector& y, Vector& gx, Vector& gy) const override {
    const double noise = sigma_ + x[0];
    const double total = noise + y[0];
    gy[0] = 1.0 / total;
    gx[0] = 1.0 / total - 1.0 / noise;
  }

  double sigma() const { return sigma_; }

 private:
  double sigma_;
};

// Minimizer-only block  weight·‖x − center‖² + linear·x  (no maximizer variables).
class SeparableQuadratic final : public BlockObjective {
 public:
  SeparableQuadratic(Vector center, double weight, Vector linear)
      : center_(std::move(center)), weight_(weight), linear_(std::move(linear)) {
    if (linear_.size() != center_.size()) throw ArgumentError("separable-quadratic: dimension mismatch");
    if (!(weight >= 0.0)) throw ArgumentError("separable-quadratic: weight must be >= 0");
  }
  SeparableQuadratic(double center, double weight = 1.0, double linear = 0.0)
      : SeparableQuadratic(Vector::Constant(1, center), weight, Vector::Constant(1, linear)) {}

  BlockDims dims() const override { return {center_.size(), 0}; }
  ObjectiveKind kind() const override { return ObjectiveKind::SmoothGeneral; }
  std::string type() const override { return "separable-quadratic"; }

  double value(const Vector& x, const Vector&) const override {
    return weight_ * squared_norm(x - center_) + dot(linear_, x);
  }
  void gradient(const Vector& x, const Vector&, Vector& gx, Vector&) const override {
    gx = 2.0 * weight_ * (x - center_) + linear_;
  }

  const Vector& center() const { return center_; }
  double weight() const { return weight_; }
  const Vector& linear() const { return linear_; }

 private:
  Vector center_;
  double weight_;
  Vector linear_;
};

}  // namespace spadmm
