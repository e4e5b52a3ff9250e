#include "gmesp/box_dual.hpp"

#include <algorithm>
#include <numeric>

namespace gmesp {

double box_dual_value(const BoxDual& bd, const Instance& inst) {
  double v = bd.tau * inst.s + bd.nu.dot(inst.c) - bd.upsilon.dot(inst.l);
  if (inst.m()) v += bd.pi.dot(inst.b);
  return v;
}

BoxDual box_budget_dual(const Vec& d, const Instance& inst, bool use_lp) {
  const int n = inst.n();
  BoxDual bd;
  if (use_lp && inst.m() > 0) {
    const LpResult lp = lp_maximize_with_duals(d, inst.l, inst.c, inst.s, inst.A, inst.b);
    bd.tau = lp.y_eq(0);
    bd.pi = lp.y_in;
    // Re-split the residual so that stationarity holds exactly.
    const Vec r = d - Vec::Constant(n, bd.tau) - inst.A.transpose() * bd.pi;
    bd.nu = r.cwiseMax(0.0);
    bd.upsilon = (-r).cwiseMax(0.0);
    bd.value = box_dual_value(bd, inst);
    return bd;
  }
  const Vec x = greedy_budget(d, inst.l, inst.c, inst.s);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d(a) > d(b); });
  bool found = false;
  for (int i : order) {
    if (x(i) < inst.c(i) - 1e-12) {
      bd.tau = d(i);
      found = true;
      break;
    }
  }
  if (!found) bd.tau = d.minCoeff();
  const Vec r = d.array() - bd.tau;
  bd.nu = r.cwiseMax(0.0);
  bd.upsilon = (-r).cwiseMax(0.0);
  bd.pi = Vec::Zero(inst.m());
  bd.value = box_dual_value(bd, inst);
  return bd;
}

}  // namespace gmesp
