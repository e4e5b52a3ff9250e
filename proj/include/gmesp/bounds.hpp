#ifndef GMESP_BOUNDS_HPP
#define GMESP_BOUNDS_HPP

#include "gmesp/bnb.hpp"
#include "gmesp/instance.hpp"
#include "gmesp/matrix_bounds.hpp"
#include "gmesp/report.hpp"

namespace gmesp {

struct BoundOptions {
  RegionSpec region = RegionSpec::no_soc();
  ScaleMode scale = ScaleMode::None;
  double gamma = 0.0;  // fixed o-scaling of glinx when positive and scale is none
  double tol = 1e-7;
  bool dual_lp = false;
};

// One bound of any kind. Scaling applies to glinx (o and g) and DDGFact (g);
// other kinds are scale invariant and ignore it. For unscaled matrix kinds the
// relaxation point is stored in *point when given.
BoundReport compute_bound(const Instance& inst, BoundKind kind, const BoundOptions& opts = {},
                          RelaxPoint* point = nullptr);

}  // namespace gmesp

#endif  // GMESP_BOUNDS_HPP
