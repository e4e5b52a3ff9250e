#ifndef GMESP_BOX_DUAL_HPP
#define GMESP_BOX_DUAL_HPP

#include "gmesp/instance.hpp"

namespace gmesp {

// Multipliers (upsilon, nu, pi, tau) with d + upsilon - nu - A^T pi - tau e = 0 minimizing
// -upsilon^T l + nu^T c + pi^T b + tau s, i.e. the dual of max d^T x over the node polytope.
struct BoxDual {
  Vec upsilon;
  Vec nu;
  Vec pi;
  double tau = 0.0;
  double value = 0.0;
};

// Closed form over {e^T x = s, l <= x <= c} with pi = 0, or the exact LP when use_lp and m > 0.
BoxDual box_budget_dual(const Vec& d, const Instance& inst, bool use_lp);

double box_dual_value(const BoxDual& bd, const Instance& inst);

}  // namespace gmesp

#endif  // GMESP_BOX_DUAL_HPP
