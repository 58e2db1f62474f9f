#pragma once

#include <cmath>
#include <string>

#include "spadmm/convex_set.hpp"
#include "spadmm/error.hpp"
#include "spadmm/lp.hpp"

namespace spadmm {

// Linear minimization oracle: argmin_{x in set} c·x.
inline Vector lmo(const ConvexSet& set, const Eigen::Ref<const Vector>& c) {
  require_size(c, set.dim(), "lmo");
  switch (set.kind()) {
    case ConvexSet::Kind::Box: {
      const auto& d = set.as_box();
      Vector x(c.size());
      for (Index i = 0; i < c.size(); ++i) {
        const double pick = c[i] > 0.0 ? d.lower[i] : c[i] < 0.0 ? d.upper[i] : (std::isfinite(d.lower[i]) ? d.lower[i] : d.upper[i]);
        if (!std::isfinite(pick)) {
          if (c[i] == 0.0) {
            x[i] = 0.0;
            continue;
          }
          throw UnsupportedError("lmo: linear objective unbounded over box at coordinate " + std::to_string(i));
        }
        x[i] = pick;
      }
      return x;
    }
    case ConvexSet::Kind::ScaledSimplex: {
      Index best = 0;
      for (Index i = 1; i < c.size(); ++i)
        if (c[i] < c[best]) best = i;
      Vector x = Vector::Zero(c.size());
      x[best] = set.as_simplex().total;
      return x;
    }
    case ConvexSet::Kind::Halfspace:
      throw UnsupportedError("lmo: linear objective unbounded over a halfspace");
    case ConvexSet::Kind::AffineBox:
    case ConvexSet::Kind::Intersection: {
      const LpResult r = solve_lp(to_standard_lp(set.polyhedral_form(), c));
      if (r.status == LpStatus::Infeasible) throw InfeasibleError("lmo: feasible set is empty");
      if (r.status == LpStatus::Unbounded) throw UnsupportedError("lmo: linear objective unbounded over set");
      return r.x.head(set.dim());
    }
  }
  throw UnsupportedError("lmo: unknown set kind");
}

}  // namespace spadmm
