#ifndef GMESP_FACT_BOUNDS_HPP
#define GMESP_FACT_BOUNDS_HPP

#include <vector>

#include "gmesp/instance.hpp"
#include "gmesp/matrix_bounds.hpp"
#include "gmesp/report.hpp"

namespace gmesp {

struct FactDualPoint {
  Mat Theta;
  Vec upsilon;
  Vec nu;
  Vec pi;
  double tau = 0.0;
  double objective = 0.0;
};

struct FactOptions {
  double tol = 1e-7;
  int max_iters = 500;
  bool dual_lp = false;
};

struct FactResult {
  Vec x;
  Vec y;  // auxiliary variable of the g-scaled bound (empty otherwise)
  BoundReport report;
  FactDualPoint dual;  // unscaled bound only
  double fw_gap = 0.0;
};

// max Gamma_t(F^T Diag(x) F) over the node polytope.
FactResult ddgfact_bound(const Instance& inst, const FactOptions& opts = {});

// Closed-form dual point at x (exact LP duals for pi when dual_lp and m > 0).
FactDualPoint ddgfact_certificate(const Instance& inst, const Vec& x, bool dual_lp = false);
FactDualPoint ddgfact_certificate(const Instance& inst, const Mat& F, const Vec& x, bool dual_lp);

// Objective of a dual point, recomputed from its components.
double fact_dual_objective(const Instance& inst, const FactDualPoint& dual);

// Stationarity and sign residuals of a dual point.
DualCheck check_fact_dual(const Instance& inst, const Mat& F, const FactDualPoint& dual, double tol = 1e-7);

// Gamma_t(F^T D^{1/2} Diag(x) D^{1/2} F) - sum log(upsilon_i) y_i with D = Diag(upsilon).
double eval_gscaled_fact(const Mat& F, const Vec& x, const Vec& y, const Vec& upsilon, int t);

// Gradient of the g-scaled objective with respect to log(upsilon), (x, y) fixed.
Vec gscaled_fact_gradient(const Mat& F, const Vec& x, const Vec& y, const Vec& upsilon, int t);

// The y that the gradient is evaluated at: x o d when feasible and the y-costs tie, else greedy.
Vec gscaled_fact_y(const Mat& F, const Vec& x, const Vec& upsilon, int t);

FactResult ddgfact_gscaled_bound(const Instance& inst, const Vec& upsilon, const FactOptions& opts = {});

struct FactUpsilonSearch {
  Vec upsilon;
  BoundReport report;
  std::vector<double> best_trace;
  Vec last_gradient;
  int outer_iterations = 0;
};

FactUpsilonSearch optimize_upsilon_fact(const Instance& inst, const Vec& upsilon0, int bfgs_iters = 30,
                                        const FactOptions& opts = {});

Fixings fix_variables(const FactDualPoint& dual, double LB);

}  // namespace gmesp

#endif  // GMESP_FACT_BOUNDS_HPP
