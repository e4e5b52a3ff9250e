#include "gmesp/fact_bounds.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

#include "gmesp/box_dual.hpp"
#include "gmesp/gamma.hpp"

namespace gmesp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Concave objective: false when z is outside its domain.
using Oracle = std::function<bool(const Vec& z, double& f, Vec* g)>;
using Lmo = std::function<Vec(const Vec& g)>;

struct FwOutput {
  Vec z;
  double f = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

// Frank-Wolfe with away steps; the starting point is kept as an atom of its own.
FwOutput frank_wolfe(const Oracle& oracle, const Lmo& lmo, const Vec& z0, double tol, int max_iters) {
  FwOutput out;
  std::vector<Vec> atoms{z0};
  std::vector<double> w{1.0};
  Vec z = z0;
  double f = 0.0;
  Vec g;
  if (!oracle(z, f, &g)) throw Error(ErrorCode::DegenerateSpectrum, "starting point outside the objective domain");
  out.gap = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    out.iterations = it + 1;
    const Vec v = lmo(g);
    const double gap_fw = g.dot(v - z);
    out.gap = gap_fw;
    if (gap_fw <= tol) break;
    std::size_t ia = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const double val = g.dot(atoms[k]);
      if (val < worst) {
        worst = val;
        ia = k;
      }
    }
    const double gap_away = g.dot(z) - worst;
    const bool fw_step = gap_fw >= gap_away || atoms.size() == 1;
    const Vec dir = fw_step ? Vec(v - z) : Vec(z - atoms[ia]);
    const double gmax = fw_step ? 1.0 : w[ia] / (1.0 - w[ia]);

    auto slope = [&](double gamma, bool& inside) {
      double fv = 0.0;
      Vec gv;
      inside = oracle(z + gamma * dir, fv, &gv);
      return inside ? gv.dot(dir) : -1.0;
    };
    double gamma = gmax;
    bool inside = false;
    if (slope(gmax, inside) < 0.0 || !inside) {
      double lo = 0.0;
      double hi = gmax;
      for (int b = 0; b < 60 && hi - lo > 1e-14 * gmax; ++b) {
        const double mid = 0.5 * (lo + hi);
        if (slope(mid, inside) > 0.0 && inside) lo = mid;
        else hi = mid;
      }
      gamma = lo;
    }
    if (gamma <= 0.0) break;
    double fn = 0.0;
    Vec gn;
    const Vec zn = z + gamma * dir;
    if (!oracle(zn, fn, &gn)) break;
    if (fw_step) {
      for (double& wk : w) wk *= (1.0 - gamma);
      bool merged = false;
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        if ((atoms[k] - v).cwiseAbs().maxCoeff() <= 1e-12) {
          w[k] += gamma;
          merged = true;
          break;
        }
      }
      if (!merged) {
        atoms.push_back(v);
        w.push_back(gamma);
      }
    } else {
      for (double& wk : w) wk *= (1.0 + gamma);
      w[ia] -= gamma;
    }
    for (std::size_t k = atoms.size(); k-- > 0;) {
      if (w[k] <= 1e-14 && atoms.size() > 1) {
        atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(k));
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(k));
      }
    }
    z = zn;
    f = fn;
    g = gn;
  }
  out.z = z;
  out.f = f;
  return out;
}

// A feasible point of the node polytope away from its facets where possible.
Vec start_point(const Instance& inst) {
  const int n = inst.n();
  if (inst.m() == 0) {
    const double room = (inst.c - inst.l).sum();
    if (room <= 0.0) return inst.l;
    return inst.l + ((inst.s - inst.l.sum()) / room) * (inst.c - inst.l);
  }
  Vec acc = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vec dir = Vec::Zero(n);
      dir(i) = sign;
      acc += lp_maximize(dir, inst.l, inst.c, inst.s, inst.A, inst.b);
    }
  }
  return acc / (2.0 * n);
}

Mat factor_of(const Instance& inst) {
  const FactorSet fs = factorize(inst.C);
  if (fs.r < inst.t) throw Error(ErrorCode::DegenerateSpectrum, "rank(C) < t");
  return fs.F;
}

Vec diag_scores(const Mat& F, const Mat& Theta) { return (F * Theta).cwiseProduct(F).rowwise().sum(); }

Mat scaled_factor(const Mat& F, const Vec& upsilon) { return upsilon.array().sqrt().matrix().asDiagonal() * F; }

double smallest_logeig_sum(const Mat& Theta, int t) {
  const Vec lam = sym_eigenvalues(Theta);
  const Eigen::Index k = lam.size();
  if (!(lam(k - 1) > 0.0)) throw Error(ErrorCode::CertificateFailure, "Theta is not positive definite");
  return lam.tail(t).array().log().sum();
}

LinearProgram joint_lp(const Instance& inst, const Vec& cost) {
  const int n = inst.n();
  const int m = inst.m();
  LinearProgram lp;
  lp.c = cost;
  lp.lo = Vec::Zero(2 * n);
  lp.lo.head(n) = inst.l;
  lp.hi = Vec(2 * n);
  lp.hi.head(n) = inst.c;
  lp.hi.tail(n) = inst.c;
  lp.Aeq = Mat::Zero(2, 2 * n);
  lp.Aeq.row(0).head(n).setOnes();
  lp.Aeq.row(1).tail(n).setOnes();
  lp.beq = Vec(2);
  lp.beq << inst.s, inst.t;
  lp.Ain = Mat::Zero(n + m, 2 * n);
  lp.Ain.topLeftCorner(n, n) = -Mat::Identity(n, n);
  lp.Ain.topRightCorner(n, n) = Mat::Identity(n, n);
  if (m) lp.Ain.bottomLeftCorner(m, n) = inst.A;
  lp.bin = Vec::Zero(n + m);
  if (m) lp.bin.tail(m) = inst.b;
  return lp;
}

}  // namespace

FactDualPoint ddgfact_certificate(const Instance& inst, const Mat& F, const Vec& x, bool dual_lp) {
  const GammaEval ge = gamma_of_factor(F, x, inst.t);
  FactDualPoint d;
  d.Theta = ge.Theta;
  const Vec scores = diag_scores(F, d.Theta);
  const BoxDual bd = box_budget_dual(scores, inst, dual_lp);
  d.upsilon = bd.upsilon;
  d.nu = bd.nu;
  d.pi = bd.pi;
  d.tau = bd.tau;
  d.objective = fact_dual_objective(inst, d);
  return d;
}

FactDualPoint ddgfact_certificate(const Instance& inst, const Vec& x, bool dual_lp) {
  return ddgfact_certificate(inst, factor_of(inst), x, dual_lp);
}

double fact_dual_objective(const Instance& inst, const FactDualPoint& dual) {
  BoxDual bd;
  bd.upsilon = dual.upsilon;
  bd.nu = dual.nu;
  bd.pi = dual.pi.size() ? dual.pi : Vec(Vec::Zero(inst.m()));
  bd.tau = dual.tau;
  return -smallest_logeig_sum(dual.Theta, inst.t) + box_dual_value(bd, inst) - inst.t;
}

DualCheck check_fact_dual(const Instance& inst, const Mat& F, const FactDualPoint& dual, double tol) {
  const int n = inst.n();
  DualCheck out;
  auto add = [&](const std::string& name, double r) {
    out.residuals.emplace_back(name, r);
    if (out.worst.empty() || r > out.max_residual) {
      out.worst = name;
      out.max_residual = r;
    }
  };
  const Vec pi = dual.pi.size() ? dual.pi : Vec(Vec::Zero(inst.m()));
  Vec r = diag_scores(F, dual.Theta) + dual.upsilon - dual.nu - Vec::Constant(n, dual.tau);
  if (inst.m()) r -= inst.A.transpose() * pi;
  add("stationarity", r.cwiseAbs().maxCoeff());
  const Vec lam = sym_eigenvalues(dual.Theta);
  const double lmin = lam(lam.size() - 1);
  add("Theta-positive-definite", lmin > 0.0 ? 0.0 : std::abs(lmin) + 1e-300);
  add("upsilon-nonneg", std::max(0.0, -dual.upsilon.minCoeff()));
  add("nu-nonneg", std::max(0.0, -dual.nu.minCoeff()));
  if (inst.m()) add("pi-nonneg", std::max(0.0, -pi.minCoeff()));
  out.objective = lmin > 0.0 ? fact_dual_objective(inst, dual) : std::numeric_limits<double>::infinity();
  out.ok = out.max_residual <= tol && lmin > 0.0;
  return out;
}

FactResult ddgfact_bound(const Instance& inst, const FactOptions& opts) {
  const auto t0 = Clock::now();
  validate(inst);
  const Mat F = factor_of(inst);
  const int t = inst.t;
  const Oracle oracle = [&](const Vec& x, double& f, Vec* g) {
    if ((x.array() < -1e-12).any()) return false;
    try {
      const GammaEval ge = gamma_of_factor(F, x, t);
      if (!std::isfinite(ge.value)) return false;
      f = ge.value;
      if (g) *g = diag_scores(F, ge.Theta);
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  const Lmo lmo = [&](const Vec& g) { return lp_maximize(g, inst.l, inst.c, inst.s, inst.A, inst.b); };
  const FwOutput fw = frank_wolfe(oracle, lmo, start_point(inst), opts.tol, opts.max_iters);

  FactResult res;
  res.x = fw.z;
  res.fw_gap = fw.gap;
  res.dual = ddgfact_certificate(inst, F, res.x, opts.dual_lp);
  const DualCheck chk = check_fact_dual(inst, F, res.dual);
  BoundReport& rep = res.report;
  rep.kind = BoundKind::DDGFact;
  rep.primal = fw.f;
  rep.certified = res.dual.objective;
  rep.certificate_ok = chk.ok;
  rep.max_residual = chk.max_residual;
  rep.iterations = fw.iterations;
  if (fw.gap > opts.tol) {
    rep.status = "max-iterations";
    rep.diagnostics.push_back("Frank-Wolfe gap " + std::to_string(fw.gap));
  }
  if (!chk.ok) {
    rep.status = "certificate-residual";
    rep.diagnostics.push_back("largest residual " + chk.worst);
  }
  rep.seconds = elapsed(t0);
  return res;
}

double eval_gscaled_fact(const Mat& F, const Vec& x, const Vec& y, const Vec& upsilon, int t) {
  const GammaEval ge = gamma_of_factor(scaled_factor(F, upsilon), x, t);
  return ge.value - upsilon.array().log().matrix().dot(y);
}

Vec gscaled_fact_gradient(const Mat& F, const Vec& x, const Vec& y, const Vec& upsilon, int t) {
  const Mat Fs = scaled_factor(F, upsilon);
  const GammaEval ge = gamma_of_factor(Fs, x, t);
  return x.cwiseProduct(diag_scores(Fs, ge.Theta)) - y;
}

Vec gscaled_fact_y(const Mat& F, const Vec& x, const Vec& upsilon, int t) {
  const Vec logs = upsilon.array().log();
  if (logs.maxCoeff() - logs.minCoeff() <= 1e-12) {
    const Mat Fs = scaled_factor(F, upsilon);
    const Vec y = x.cwiseProduct(diag_scores(Fs, gamma_of_factor(Fs, x, t).Theta));
    if (y.minCoeff() >= -1e-6 && (y - x).maxCoeff() <= 1e-6 && std::abs(y.sum() - t) <= 1e-6) return y;
  }
  return greedy_budget(-logs, Vec::Zero(x.size()), x.cwiseMax(0.0), t);
}

FactResult ddgfact_gscaled_bound(const Instance& inst, const Vec& upsilon, const FactOptions& opts) {
  const auto t0 = Clock::now();
  validate(inst);
  const int n = inst.n();
  const int t = inst.t;
  if (upsilon.size() != n || (upsilon.array() <= 0.0).any())
    throw Error(ErrorCode::InvariantViolation, "upsilon must be a positive n-vector");
  const Mat F = factor_of(inst);
  if ((upsilon.array() == 1.0).all()) {
    FactResult res = ddgfact_bound(inst, opts);
    res.y = gscaled_fact_y(F, res.x, upsilon, t);
    res.report.scaling = "g";
    res.report.upsilon = upsilon;
    res.report.seconds = elapsed(t0);
    return res;
  }
  const Mat Fs = scaled_factor(F, upsilon);
  const Vec logs = upsilon.array().log();
  const Oracle oracle = [&](const Vec& z, double& f, Vec* g) {
    if ((z.array() < -1e-12).any()) return false;
    try {
      const GammaEval ge = gamma_of_factor(Fs, z.head(n), t);
      if (!std::isfinite(ge.value)) return false;
      f = ge.value - logs.dot(z.tail(n));
      if (g) {
        g->resize(2 * n);
        g->head(n) = diag_scores(Fs, ge.Theta);
        g->tail(n) = -logs;
      }
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  const Lmo lmo = [&](const Vec& g) {
    const LpResult lp = lp_solve(joint_lp(inst, g));
    return lp.x;
  };
  Vec z0(2 * n);
  z0.head(n) = start_point(inst);
  z0.tail(n) = (static_cast<double>(t) / inst.s) * z0.head(n);
  const FwOutput fw = frank_wolfe(oracle, lmo, z0, opts.tol, opts.max_iters);

  FactResult res;
  res.x = fw.z.head(n);
  res.y = fw.z.tail(n);
  res.fw_gap = fw.gap;
  // Concavity: f(x, y) <= Gamma(x^) + d^T (x - x^) - log(upsilon)^T y on the whole polytope.
  const GammaEval ge = gamma_of_factor(Fs, res.x, t);
  Vec cost(2 * n);
  cost.head(n) = diag_scores(Fs, ge.Theta);
  cost.tail(n) = -logs;
  const LpResult lp = lp_solve(joint_lp(inst, cost));
  BoundReport& rep = res.report;
  rep.kind = BoundKind::DDGFact;
  rep.scaling = "g";
  rep.upsilon = upsilon;
  rep.primal = fw.f;
  rep.certified = ge.value - cost.head(n).dot(res.x) + lp.value;
  rep.certificate_ok = std::isfinite(rep.certified);
  rep.iterations = fw.iterations;
  if (fw.gap > opts.tol) {
    rep.status = "max-iterations";
    rep.diagnostics.push_back("Frank-Wolfe gap " + std::to_string(fw.gap));
  }
  rep.seconds = elapsed(t0);
  return res;
}

FactUpsilonSearch optimize_upsilon_fact(const Instance& inst, const Vec& upsilon0, int bfgs_iters,
                                        const FactOptions& opts) {
  const auto t0 = Clock::now();
  const int n = inst.n();
  const int t = inst.t;
  const Mat F = factor_of(inst);
  FactUpsilonSearch out;
  Vec psi = upsilon0.array().log();
  Vec ups = upsilon0;
  FactResult cur = ddgfact_gscaled_bound(inst, ups, opts);
  int total = cur.report.iterations;
  out.upsilon = ups;
  out.report = cur.report;
  out.best_trace.push_back(cur.report.certified);
  Vec y = gscaled_fact_y(F, cur.x, ups, t);
  Vec g = gscaled_fact_gradient(F, cur.x, y, ups, t);
  Mat Hinv = Mat::Identity(n, n);
  for (int k = 0; k < bfgs_iters; ++k) {
    if (g.cwiseAbs().maxCoeff() <= 1e-6) break;
    Vec p = -Hinv * g;
    if (g.dot(p) >= 0.0) {
      Hinv.setIdentity();
      p = -g;
    }
    const double f0 = eval_gscaled_fact(F, cur.x, y, ups, t);
    double alpha = 1.0;
    bool ok = false;
    for (int ls = 0; ls < 40; ++ls) {
      try {
        const Vec trial = (psi + alpha * p).array().exp();
        if (eval_gscaled_fact(F, cur.x, y, trial, t) <= f0 + 1e-4 * alpha * g.dot(p)) {
          ok = true;
          break;
        }
      } catch (const Error&) {
      }
      alpha *= 0.5;
    }
    if (!ok) break;
    const Vec psi_new = psi + alpha * p;
    ups = psi_new.array().exp();
    FactResult next = ddgfact_gscaled_bound(inst, ups, opts);
    total += next.report.iterations;
    const Vec y_new = gscaled_fact_y(F, next.x, ups, t);
    const Vec g_new = gscaled_fact_gradient(F, next.x, y_new, ups, t);
    const Vec s = psi_new - psi;
    const Vec dy = g_new - g;
    const double sy = s.dot(dy);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Mat I = Mat::Identity(n, n);
      Hinv = (I - rho * s * dy.transpose()) * Hinv * (I - rho * dy * s.transpose()) + rho * s * s.transpose();
    }
    psi = psi_new;
    g = g_new;
    y = y_new;
    cur = next;
    ++out.outer_iterations;
    if (cur.report.certified < out.report.certified) {
      out.report = cur.report;
      out.upsilon = ups;
    }
    out.best_trace.push_back(out.report.certified);
  }
  out.last_gradient = g;
  out.report.scaling = "g";
  out.report.upsilon = out.upsilon;
  out.report.iterations = total;
  out.report.seconds = elapsed(t0);
  return out;
}

Fixings fix_variables(const FactDualPoint& dual, double LB) {
  return fix_variables(dual.upsilon, dual.nu, dual.objective, LB);
}

}  // namespace gmesp
