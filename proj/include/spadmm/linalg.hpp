#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>

#include "spadmm/error.hpp"

namespace spadmm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Reductions below accumulate in ascending index order so results do not
// depend on SIMD width or thread count.

inline double dot(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(const Eigen::Ref<const Vector>& a) { return dot(a, a); }

inline double norm(const Eigen::Ref<const Vector>& a) { return std::sqrt(squared_norm(a)); }

inline double distance(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline void require_size(const Eigen::Ref<const Vector>& v, Index n, const char* what) {
  if (v.size() != n) {
    throw ArgumentError(std::string(what) + ": expected dimension " + std::to_string(n) + ", got " +
                        std::to_string(v.size()));
  }
}

inline bool all_finite(const Eigen::Ref<const Vector>& v) {
  for (Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

}  // namespace spadmm
