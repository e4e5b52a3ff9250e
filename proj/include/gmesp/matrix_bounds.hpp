#ifndef GMESP_MATRIX_BOUNDS_HPP
#define GMESP_MATRIX_BOUNDS_HPP

#include <string>
#include <utility>
#include <vector>

#include "gmesp/instance.hpp"
#include "gmesp/report.hpp"

namespace gmesp {

enum class UpperBound { DiagX, Identity };

struct RegionSpec {
  bool soc_rows = false;
  UpperBound upper = UpperBound::DiagX;

  static RegionSpec full() { return {true, UpperBound::DiagX}; }
  static RegionSpec no_soc() { return {false, UpperBound::DiagX}; }
  static RegionSpec identity_cap() { return {true, UpperBound::Identity}; }
  std::string name() const;
};

RegionSpec parse_region(const std::string& name);

enum class MatrixKind { Glinx, GnlpId, GnlpComp };

const char* to_string(MatrixKind kind);
BoundKind bound_kind_of(MatrixKind kind);

// o-scaling gamma, or g-scaling upsilon when non-empty (glinx only).
struct ScalingState {
  double gamma = 1.0;
  Vec upsilon;

  double psi() const;
  bool gscaled() const { return upsilon.size() > 0; }
};

struct MatrixDualPoint {
  MatrixKind kind = MatrixKind::Glinx;
  bool soc_rows = false;
  UpperBound upper = UpperBound::DiagX;
  Mat Theta;
  Vec upsilon;
  Vec nu;
  Vec eta;
  Vec pi;
  double tau = 0.0;
  double xi = 0.0;
  Mat Z;
  Mat Omega;
  Mat W;
  double objective = 0.0;
};

// Multipliers read off the barrier at the final path parameter.
struct BarrierMultipliers {
  bool valid = false;
  double mu = 0.0;
  Mat Z;
  Mat W;
  Vec eta;
  std::vector<int> support;  // indices carrying the matrix variable
};

struct SolverOptions {
  double mu0 = 1.0;
  double mu_factor = 5.0;
  double mu_min = 1e-9;
  int max_newton = 80;
  double newton_tol = 1e-11;
  bool dual_lp = false;
};

struct RelaxResult {
  RelaxPoint point;
  BoundReport report;
  MatrixDualPoint dual;
  BarrierMultipliers multipliers;
};

double eval_glinx(const Mat& C, const Vec& x, const Mat& X, double gamma = 1.0);
double eval_companion_glinx(const Mat& C, const Vec& x, const Mat& X);
// t < 0 uses tr X.
double eval_gnlp(const Mat& C, const Vec& x, const Mat& X, MatrixKind kind, int t = -1);
double eval_gscaled_glinx(const Mat& C, const Vec& x, const Mat& X, const Vec& upsilon);

// Objective of a relaxation kind at (x, X) under a scaling.
double eval_relaxation(const Mat& C, MatrixKind kind, const ScalingState& scaling, const Mat& X, int t);

RelaxResult solve_relaxation(const Instance& inst, MatrixKind kind, const RegionSpec& region,
                             const ScalingState& scaling = {}, const SolverOptions& opts = {});

// Dual point built from a primal point. Barrier multipliers are used when supplied;
// otherwise Z is chosen by a one-dimensional search over projections of the gradient.
MatrixDualPoint certify(const Instance& inst, MatrixKind kind, const RegionSpec& region, const RelaxPoint& point,
                        const ScalingState& scaling = {}, const BarrierMultipliers* multipliers = nullptr,
                        bool dual_lp = false);

struct DualCheck {
  std::vector<std::pair<std::string, double>> residuals;
  double max_residual = 0.0;
  std::string worst;
  double objective = 0.0;
  bool ok = false;
};

// Stationarity and cone residuals together with the recomputed dual objective.
DualCheck check_dual(const Instance& inst, const MatrixDualPoint& dual, const ScalingState& scaling = {},
                     double tol = 1e-6);

// Dual objective value of a dual point (no feasibility check).
double dual_objective(const Instance& inst, const MatrixDualPoint& dual, const ScalingState& scaling = {});

// dh/dpsi of the o-scaled glinx objective at X.
double glinx_dh_dpsi(const Mat& C, const Mat& X, double gamma);

struct GammaSearch {
  double gamma = 1.0;
  BoundReport report;
  std::vector<std::pair<double, double>> trace;  // (psi, certified)
};

GammaSearch optimize_gamma(const Instance& inst, const RegionSpec& region, double psi0,
                           const SolverOptions& opts = {});
double default_psi(const Instance& inst);

// Gradient of the g-scaled glinx objective with respect to log(upsilon), X fixed.
Vec gscaled_glinx_gradient(const Mat& C, const Mat& X, const Vec& upsilon);

struct UpsilonSearch {
  Vec upsilon;
  BoundReport report;
  std::vector<double> best_trace;
  Vec last_gradient;
};

UpsilonSearch optimize_upsilon_glinx(const Instance& inst, const RegionSpec& region, const Vec& upsilon0,
                                     int iters = 30, const SolverOptions& opts = {});

struct Fixings {
  std::vector<int> F0;
  std::vector<int> F1;
};

Fixings fix_variables(const Vec& upsilon, const Vec& nu, double objective, double LB, const Vec& l = Vec(),
                      const Vec& c = Vec());
Fixings fix_variables(const MatrixDualPoint& dual, double LB);

double soc_gap_bound(const Mat& C, int s, int t);

}  // namespace gmesp

#endif  // GMESP_MATRIX_BOUNDS_HPP
