#include "gmesp/bounds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "gmesp/fact_bounds.hpp"
#include "gmesp/spectral.hpp"

namespace gmesp {

namespace {

MatrixKind matrix_kind(BoundKind kind) {
  switch (kind) {
    case BoundKind::Glinx: return MatrixKind::Glinx;
    case BoundKind::GnlpId: return MatrixKind::GnlpId;
    case BoundKind::GnlpComp: return MatrixKind::GnlpComp;
    default: throw Error(ErrorCode::Internal, "not a matrix bound");
  }
}

}  // namespace

BoundReport compute_bound(const Instance& inst, BoundKind kind, const BoundOptions& opts, RelaxPoint* point) {
  validate(inst);
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvariantViolation, "tolerance must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  BoundReport rep;
  SolverOptions so;
  so.dual_lp = opts.dual_lp;
  so.mu_min = std::min(so.mu_min, opts.tol * 1e-2);
  FactOptions fo;
  fo.tol = opts.tol;
  fo.dual_lp = opts.dual_lp;
  switch (kind) {
    case BoundKind::Spectral:
      rep.kind = kind;
      rep.primal = rep.certified = spectral_bound(inst.C, inst.t);
      rep.certificate_ok = true;
      break;
    case BoundKind::LagrangianSpectral: {
      const SpectralBoundResult r = lagrangian_spectral_bound(inst);
      rep.kind = kind;
      rep.primal = rep.certified = r.value;
      rep.certificate_ok = true;
      rep.iterations = r.iterations;
      break;
    }
    case BoundKind::DDGFact:
      if (opts.scale == ScaleMode::G) {
        rep = optimize_upsilon_fact(inst, Vec::Ones(inst.n()), 30, fo).report;
      } else {
        rep = ddgfact_bound(inst, fo).report;
      }
      break;
    case BoundKind::Glinx:
      if (opts.scale == ScaleMode::None) {
        ScalingState sc;
        if (opts.gamma > 0.0) sc.gamma = opts.gamma;
        const RelaxResult r = solve_relaxation(inst, MatrixKind::Glinx, opts.region, sc, so);
        rep = r.report;
        if (point) *point = r.point;
        if (opts.gamma > 0.0) {
          rep.scaling = "o";
          rep.gamma = opts.gamma;
        }
      } else {
        const GammaSearch gs = optimize_gamma(inst, opts.region, default_psi(inst), so);
        rep = gs.report;
        if (opts.scale == ScaleMode::G) {
          const Vec ups0 = Vec::Constant(inst.n(), std::pow(gs.gamma, 0.25));
          UpsilonSearch us = optimize_upsilon_glinx(inst, opts.region, ups0, 30, so);
          if (us.report.certificate_ok && (!rep.certificate_ok || us.report.certified < rep.certified))
            rep = us.report;
        }
      }
      break;
    case BoundKind::GnlpId:
    case BoundKind::GnlpComp: {
      const RelaxResult r = solve_relaxation(inst, matrix_kind(kind), opts.region, {}, so);
      rep = r.report;
      if (point) *point = r.point;
      break;
    }
  }
  if (opts.scale != ScaleMode::None && kind != BoundKind::Glinx &&
      !(kind == BoundKind::DDGFact && opts.scale == ScaleMode::G))
    rep.diagnostics.push_back(std::string("scaling ") + to_string(opts.scale) + " has no effect on this bound");
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace gmesp
