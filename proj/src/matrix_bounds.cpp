#include "gmesp/matrix_bounds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "barrier.hpp"
#include "gmesp/box_dual.hpp"
#include "matrix_model.hpp"

namespace gmesp {

using detail::Model;

std::string RegionSpec::name() const {
  if (upper == UpperBound::Identity) return soc_rows ? "identity-cap" : "identity-cap-no-soc";
  return soc_rows ? "full" : "no-soc";
}

RegionSpec parse_region(const std::string& name) {
  if (name == "full") return RegionSpec::full();
  if (name == "no-soc") return RegionSpec::no_soc();
  if (name == "identity-cap") return RegionSpec::identity_cap();
  if (name == "identity-cap-no-soc") return {false, UpperBound::Identity};
  throw Error(ErrorCode::Parse, "unknown region '" + name + "'");
}

const char* to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::Glinx: return "glinx";
    case MatrixKind::GnlpId: return "gnlp-id";
    case MatrixKind::GnlpComp: return "gnlp-comp";
  }
  return "unknown";
}

BoundKind bound_kind_of(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::Glinx: return BoundKind::Glinx;
    case MatrixKind::GnlpId: return BoundKind::GnlpId;
    case MatrixKind::GnlpComp: return BoundKind::GnlpComp;
  }
  return BoundKind::Glinx;
}

double ScalingState::psi() const { return std::log(gamma); }

namespace {

double model_eval_or_throw(const Model& md, const Mat& X) {
  double v = 0.0;
  if (!detail::model_value(md, X, v)) throw Error(ErrorCode::NearSingular, "relaxation objective: argument not positive definite");
  return v;
}

Mat sym(const Mat& M) { return (M + M.transpose()) / 2.0; }

}  // namespace

double eval_glinx(const Mat& C, const Vec&, const Mat& X, double gamma) {
  ScalingState sc;
  sc.gamma = gamma;
  return model_eval_or_throw(detail::make_model(C, X.trace(), MatrixKind::Glinx, sc), X);
}

double eval_companion_glinx(const Mat& C, const Vec&, const Mat& X) {
  const Eigen::Index n = C.rows();
  Eigen::LLT<Mat> llt(C);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NearSingular, "companion glinx requires C positive definite");
  // C (C^-1 (I - X) C^-1 + X) C = I - X + C X C
  const Mat arg = sym(Mat::Identity(n, n) - X + C * X * C);
  double ld = 0.0;
  if (!ldet_chol(arg, ld)) throw Error(ErrorCode::NearSingular, "companion glinx: singular argument");
  return 0.5 * ld;
}

double eval_gnlp(const Mat& C, const Vec&, const Mat& X, MatrixKind kind, int t) {
  const double tt = t >= 0 ? static_cast<double>(t) : X.trace();
  return model_eval_or_throw(detail::make_model(C, tt, kind, {}), X);
}

double eval_gscaled_glinx(const Mat& C, const Vec&, const Mat& X, const Vec& upsilon) {
  ScalingState sc;
  sc.upsilon = upsilon;
  return model_eval_or_throw(detail::make_model(C, X.trace(), MatrixKind::Glinx, sc), X);
}

double eval_relaxation(const Mat& C, MatrixKind kind, const ScalingState& scaling, const Mat& X, int t) {
  return model_eval_or_throw(detail::make_model(C, t, kind, scaling), X);
}

namespace {

std::string scaling_name(const ScalingState& sc) {
  if (sc.gscaled()) return "g";
  return sc.gamma == 1.0 ? "none" : "o";
}

struct Candidate {
  Mat Z;
  Mat W;
  Vec eta;
};

// Completes a candidate (Z, W, eta) into a dual point.
MatrixDualPoint finalize(const Instance& inst, const Model& md, const Mat& Theta, const Mat& G, const Candidate& cand,
                         bool soc, UpperBound upper, MatrixKind kind, bool dual_lp) {
  const int n = inst.n();
  MatrixDualPoint d;
  d.kind = kind;
  d.soc_rows = soc;
  d.upper = upper;
  d.Theta = Theta;
  d.Z = cand.Z;
  d.W = cand.W;
  d.eta = cand.eta;
  const Mat M = sym(d.Z + 0.5 * (d.W + d.W.transpose()) - G);
  const Vec lam = sym_eigenvalues(M);
  const double lmin = lam(n - 1);
  d.xi = -lmin + 1e-12 * std::max(1.0, std::abs(lmin)) + 4.0 * std::numeric_limits<double>::epsilon() * M.cwiseAbs().maxCoeff();
  d.Omega = M + d.xi * Mat::Identity(n, n);
  Vec scores = Vec::Zero(n);
  if (upper == UpperBound::DiagX) scores += d.Z.diagonal();
  if (soc) scores += d.eta;
  const BoxDual bd = box_budget_dual(scores, inst, dual_lp);
  d.upsilon = bd.upsilon;
  d.nu = bd.nu;
  d.pi = bd.pi;
  d.tau = bd.tau;
  d.objective = detail::model_conjugate(md, Theta) + d.xi * inst.t + bd.value;
  if (upper == UpperBound::Identity) d.objective += d.Z.trace();
  return d;
}

}  // namespace

MatrixDualPoint certify(const Instance& inst, MatrixKind kind, const RegionSpec& region, const RelaxPoint& point,
                        const ScalingState& scaling, const BarrierMultipliers* mult, bool dual_lp) {
  const int n = inst.n();
  const Model md = detail::make_model(inst.C, inst.t, kind, scaling);
  const bool forced = inst.t == inst.s && (region.upper == UpperBound::DiagX || region.soc_rows);
  // With t = s the linked regions all collapse to X = Diag(x); the P-dual is valid for each.
  const bool soc = forced ? false : region.soc_rows;
  const UpperBound upper = forced ? UpperBound::DiagX : region.upper;

  Mat Theta;
  if (md.p > 0) {
    const Mat K = detail::model_K(md, point.X);
    Eigen::LLT<Mat> llt(K);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::NearSingular, "certify: ldet argument not positive definite");
    Theta = sym(md.alpha * llt.solve(Mat::Identity(md.p, md.p)));
  } else {
    Theta = Mat(0, 0);
  }
  const Mat G = detail::model_gradient(md, Theta);

  MatrixDualPoint best;
  best.objective = std::numeric_limits<double>::infinity();
  auto consider = [&](const Candidate& c) {
    MatrixDualPoint d = finalize(inst, md, Theta, G, c, soc, upper, kind, dual_lp);
    if (d.objective < best.objective) best = d;
  };

  // Candidate from barrier multipliers.
  if (mult && mult->valid && !forced) {
    Candidate c;
    c.Z = project_psd(sym(mult->Z));
    c.W = mult->W;
    c.eta = mult->eta;
    std::vector<int> J = mult->support;
    std::vector<int> O;
    std::vector<char> inJ(n, 0);
    for (int i : J) inJ[i] = 1;
    for (int i = 0; i < n; ++i)
      if (!inJ[i]) O.push_back(i);
    bool usable = true;
    if (!O.empty()) {
      const int nJ = static_cast<int>(J.size());
      const int nO = static_cast<int>(O.size());
      Mat ZJJ(nJ, nJ), GJJ(nJ, nJ), WJJ(nJ, nJ), GJO(nJ, nO), GOO(nO, nO);
      for (int a = 0; a < nJ; ++a) {
        for (int b = 0; b < nJ; ++b) {
          ZJJ(a, b) = c.Z(J[a], J[b]);
          GJJ(a, b) = G(J[a], J[b]);
          WJJ(a, b) = c.W(J[a], J[b]);
        }
        for (int b = 0; b < nO; ++b) GJO(a, b) = G(J[a], O[b]);
      }
      for (int a = 0; a < nO; ++a)
        for (int b = 0; b < nO; ++b) GOO(a, b) = G(O[a], O[b]);
      const Mat MJJ = sym(ZJJ + 0.5 * (WJJ + WJJ.transpose()) - GJJ);
      const Vec lamJ = sym_eigenvalues(MJJ);
      const double lJ = lamJ(nJ - 1);
      if (upper == UpperBound::DiagX) {
        // Extend Z across the deleted rows so the stationarity matrix stays block diagonal.
        Eigen::LLT<Mat> llt(ZJJ);
        if (llt.info() != Eigen::Success) {
          usable = false;
        } else {
          const Mat S = sym(GJO.transpose() * llt.solve(GJO));
          const Vec lamT = sym_eigenvalues(Mat(S - GOO));
          const double rho = std::max(0.0, lJ - lamT(nO - 1));
          for (int a = 0; a < nJ; ++a)
            for (int b = 0; b < nO; ++b) c.Z(J[a], O[b]) = c.Z(O[b], J[a]) = GJO(a, b);
          for (int a = 0; a < nO; ++a)
            for (int b = 0; b < nO; ++b) c.Z(O[a], O[b]) = S(a, b) + (a == b ? rho : 0.0);
        }
      } else {
        // Rows with x_i = 0 carry free row-norm multipliers.
        for (int a = 0; a < nO; ++a) {
          for (int b = 0; b < nJ; ++b) c.W(O[a], J[b]) = 2.0 * GJO(b, a);
          for (int b = 0; b < nO; ++b) c.W(O[a], O[b]) = GOO(a, b) + (a == b ? lJ : 0.0);
          c.eta(O[a]) = c.W.row(O[a]).norm();
        }
      }
    }
    if (usable) consider(c);
    if (upper == UpperBound::DiagX && !O.empty()) {
      // Rows with c_i = 0 carry free diagonal scores; a large block decouples them.
      Candidate big;
      big.Z = project_psd(sym(mult->Z));
      big.W = mult->W;
      big.eta = mult->eta;
      const double rho = 1e6 * (1.0 + G.cwiseAbs().maxCoeff());
      for (int i : O) {
        big.Z.row(i).setZero();
        big.Z.col(i).setZero();
        big.W.row(i).setZero();
        big.W.col(i).setZero();
        big.eta(i) = 0.0;
      }
      for (int i : O) big.Z(i, i) = rho;
      consider(big);
    }
  }

  // Candidate without multipliers: Z = proj(G - xi I) with xi chosen by golden section.
  {
    const Spectrum sp = sym_eigen(G);
    auto make = [&](double xi0) {
      Candidate c;
      const Vec clamped = (sp.values.array() - xi0).cwiseMax(0.0);
      c.Z = sp.vectors * clamped.asDiagonal() * sp.vectors.transpose();
      c.W = Mat::Zero(n, n);
      c.eta = Vec::Zero(n);
      return c;
    };
    auto objective = [&](double xi0) { return finalize(inst, md, Theta, G, make(xi0), soc, upper, kind, dual_lp).objective; };
    double lo = sp.values(n - 1) - 1e-9;
    double hi = sp.values(0) + 1e-9;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - phi * (hi - lo);
    double b = lo + phi * (hi - lo);
    double fa = objective(a);
    double fb = objective(b);
    for (int it = 0; it < 90 && hi - lo > 1e-13 * (1.0 + std::abs(hi)); ++it) {
      if (fa <= fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - phi * (hi - lo);
        fa = objective(a);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + phi * (hi - lo);
        fb = objective(b);
      }
    }
    consider(make(fa <= fb ? a : b));
  }
  return best;
}

double dual_objective(const Instance& inst, const MatrixDualPoint& dual, const ScalingState& scaling) {
  const Model md = detail::make_model(inst.C, inst.t, dual.kind, scaling);
  BoxDual bd;
  bd.upsilon = dual.upsilon;
  bd.nu = dual.nu;
  bd.pi = dual.pi.size() ? dual.pi : Vec(Vec::Zero(inst.m()));
  bd.tau = dual.tau;
  double v = detail::model_conjugate(md, dual.Theta) + dual.xi * inst.t + box_dual_value(bd, inst);
  if (dual.upper == UpperBound::Identity) v += dual.Z.trace();
  return v;
}

DualCheck check_dual(const Instance& inst, const MatrixDualPoint& dual, const ScalingState& scaling, double tol) {
  const int n = inst.n();
  const int m = inst.m();
  const Model md = detail::make_model(inst.C, inst.t, dual.kind, scaling);
  DualCheck out;
  auto add = [&](const std::string& name, double r) {
    out.residuals.emplace_back(name, r);
    if (r > out.max_residual || out.worst.empty()) {
      if (r >= out.max_residual) out.worst = name;
      out.max_residual = std::max(out.max_residual, r);
    }
  };
  const Mat& W = dual.W.size() ? dual.W : Mat(Mat::Zero(n, n));
  const Vec& eta = dual.eta.size() ? dual.eta : Vec(Vec::Zero(n));
  const Vec pi = dual.pi.size() ? dual.pi : Vec(Vec::Zero(m));
  if (dual.Theta.rows() != md.p || dual.Z.rows() != n || dual.Omega.rows() != n || dual.upsilon.size() != n ||
      dual.nu.size() != n || pi.size() != m) {
    throw Error(ErrorCode::CertificateFailure, "dual point has wrong dimensions");
  }

  const Mat G = detail::model_gradient(md, dual.Theta);
  const Mat RX = 0.5 * (W + W.transpose()) - dual.Omega + dual.Z - G + dual.xi * Mat::Identity(n, n);
  add("matrix-stationarity", RX.cwiseAbs().maxCoeff());
  Vec rx = dual.upsilon - dual.nu - Vec::Constant(n, dual.tau);
  if (m) rx -= inst.A.transpose() * pi;
  if (dual.soc_rows) rx += eta;
  if (dual.upper == UpperBound::DiagX) rx += dual.Z.diagonal();
  add("vector-stationarity", rx.cwiseAbs().maxCoeff());

  const double theta_min = md.p ? sym_eigenvalues(dual.Theta)(md.p - 1) : 1.0;
  add("Theta-positive-definite", theta_min > 0.0 ? 0.0 : std::abs(theta_min) + 1e-300);
  add("Z-psd", std::max(0.0, -sym_eigenvalues(dual.Z)(n - 1)));
  add("Omega-psd", std::max(0.0, -sym_eigenvalues(dual.Omega)(n - 1)));
  add("upsilon-nonneg", std::max(0.0, -dual.upsilon.minCoeff()));
  add("nu-nonneg", std::max(0.0, -dual.nu.minCoeff()));
  if (m) add("pi-nonneg", std::max(0.0, -pi.minCoeff()));
  if (dual.soc_rows) {
    add("eta-nonneg", std::max(0.0, -eta.minCoeff()));
    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, W.row(i).norm() - eta(i));
    add("row-norm-cone", worst);
  } else {
    add("W-zero-without-soc", W.cwiseAbs().maxCoeff());
    add("eta-zero-without-soc", eta.cwiseAbs().maxCoeff());
  }
  if (theta_min > 0.0) out.objective = dual_objective(inst, dual, scaling);
  else out.objective = std::numeric_limits<double>::infinity();
  out.ok = out.max_residual <= tol && theta_min > 0.0;
  return out;
}

RelaxResult solve_relaxation(const Instance& inst, MatrixKind kind, const RegionSpec& region,
                             const ScalingState& scaling, const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(inst);
  const Model md = detail::make_model(inst.C, inst.t, kind, scaling);
  const detail::Barrier barrier(inst, md, region);
  const detail::PathResult path = detail::follow_path(barrier, opts);

  RelaxResult res;
  res.point.x = barrier.x_of(path.v);
  res.point.X = barrier.X_of(path.v);
  res.multipliers = barrier.multipliers(path.v, path.mu);
  BoundReport& rep = res.report;
  rep.kind = bound_kind_of(kind);
  rep.region = region.name();
  rep.scaling = scaling_name(scaling);
  rep.gamma = scaling.gamma;
  rep.upsilon = scaling.upsilon;
  rep.iterations = path.newton_steps;
  rep.primal = model_eval_or_throw(md, res.point.X);
  if (!path.converged) {
    rep.status = "max-iterations";
    rep.diagnostics.push_back("barrier path stalled at mu=" + std::to_string(path.mu));
  }
  res.dual = certify(inst, kind, region, res.point, scaling, &res.multipliers, opts.dual_lp);
  const DualCheck chk = check_dual(inst, res.dual, scaling);
  rep.certified = res.dual.objective;
  rep.certificate_ok = chk.ok;
  rep.max_residual = chk.max_residual;
  if (!chk.ok) {
    rep.status = "certificate-residual";
    rep.diagnostics.push_back("largest residual " + chk.worst + " = " + std::to_string(chk.max_residual));
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

double glinx_dh_dpsi(const Mat& C, const Mat& X, double gamma) {
  const Eigen::Index n = C.rows();
  const Mat I = Mat::Identity(n, n);
  const Mat L = sym(gamma * C * X * C + I - X);
  Eigen::LLT<Mat> llt(L);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NearSingular, "glinx_dh_dpsi: L not positive definite");
  const Mat Linv = llt.solve(I);
  return 0.5 * (Linv.cwiseProduct(X - I).sum() + static_cast<double>(n) - X.trace());
}

double default_psi(const Instance& inst) {
  const Vec lam = sym_eigenvalues(inst.C);
  if (!(lam(inst.t - 1) > 0.0)) throw Error(ErrorCode::RankDeficient, "lambda_t(C) is zero");
  return -2.0 * std::log(lam(inst.t - 1));
}

GammaSearch optimize_gamma(const Instance& inst, const RegionSpec& region, double psi0, const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  GammaSearch out;
  int total_iters = 0;
  struct Eval {
    double psi;
    double h;
    double dh;
  };
  auto eval = [&](double psi) {
    ScalingState sc;
    sc.gamma = std::exp(psi);
    const RelaxResult r = solve_relaxation(inst, MatrixKind::Glinx, region, sc, opts);
    total_iters += r.report.iterations;
    out.trace.emplace_back(psi, r.report.certified);
    if (out.trace.size() == 1 || r.report.certified < out.report.certified) {
      out.report = r.report;
      out.gamma = sc.gamma;
    }
    return Eval{psi, r.report.primal, glinx_dh_dpsi(inst.C, r.point.X, sc.gamma)};
  };

  Eval a = eval(psi0);
  if (std::abs(a.dh) > 1e-7) {
    // Bracket the root of dh/dpsi.
    double step = a.dh > 0 ? -1.0 : 1.0;
    Eval b = eval(psi0 + step);
    int guard = 0;
    while ((b.dh > 0) == (a.dh > 0) && std::abs(b.dh) > 1e-7 && guard++ < 12) {
      a = b;
      step *= 2.0;
      b = eval(a.psi + step);
    }
    if ((b.dh > 0) != (a.dh > 0) && std::abs(b.dh) > 1e-7) {
      Eval lo = a.dh < 0 ? a : b;
      Eval hi = a.dh < 0 ? b : a;
      int side = 0;
      for (int it = 0; it < 25; ++it) {
        double wl = 1.0, wh = 1.0;
        if (side == -1) wh = 0.5;
        if (side == 1) wl = 0.5;
        double psi = (lo.psi * hi.dh * wh - hi.psi * lo.dh * wl) / (hi.dh * wh - lo.dh * wl);
        if (!(psi > std::min(lo.psi, hi.psi) && psi < std::max(lo.psi, hi.psi))) psi = 0.5 * (lo.psi + hi.psi);
        const Eval mid = eval(psi);
        if (std::abs(mid.dh) <= 1e-7 || std::abs(hi.psi - lo.psi) < 1e-7) break;
        if (mid.dh < 0) {
          lo = mid;
          side = -1;
        } else {
          hi = mid;
          side = 1;
        }
      }
    }
  }
  out.report.scaling = "o";
  out.report.iterations = total_iters;
  out.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

Vec gscaled_glinx_gradient(const Mat& C, const Mat& X, const Vec& upsilon) {
  const Eigen::Index n = C.rows();
  const auto D = upsilon.asDiagonal();
  const Mat Ct = D * C * D;
  const Mat K = sym(Ct * X * Ct + Mat::Identity(n, n) - X);
  Eigen::LLT<Mat> llt(K);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NearSingular, "g-scaled glinx: argument not positive definite");
  const Mat Kinv = llt.solve(Mat::Identity(n, n));
  const Mat A1 = Ct * X * Ct * Kinv;
  const Mat A2 = X * Ct * Kinv * Ct;
  return A1.diagonal() + A2.diagonal() - 2.0 * X.diagonal();
}

UpsilonSearch optimize_upsilon_glinx(const Instance& inst, const RegionSpec& region, const Vec& upsilon0, int iters,
                                     const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = inst.n();
  UpsilonSearch out;
  Vec psi = upsilon0.array().log();
  ScalingState sc;
  sc.upsilon = upsilon0;
  RelaxResult cur = solve_relaxation(inst, MatrixKind::Glinx, region, sc, opts);
  int total_iters = cur.report.iterations;
  out.upsilon = upsilon0;
  out.report = cur.report;
  out.best_trace.push_back(cur.report.certified);
  Vec g = gscaled_glinx_gradient(inst.C, cur.point.X, sc.upsilon);
  Mat Hinv = Mat::Identity(n, n);
  auto frozen = [&](const Mat& X, const Vec& p, double& v) {
    ScalingState s2;
    s2.upsilon = p.array().exp();
    double val = 0.0;
    if (!detail::model_value(detail::make_model(inst.C, inst.t, MatrixKind::Glinx, s2), X, val)) return false;
    v = val;
    return true;
  };
  for (int k = 0; k < iters; ++k) {
    if (g.cwiseAbs().maxCoeff() <= 1e-6) break;
    Vec p = -Hinv * g;
    if (g.dot(p) >= 0.0) {
      Hinv.setIdentity();
      p = -g;
    }
    double f0 = 0.0;
    frozen(cur.point.X, psi, f0);
    double alpha = 1.0;
    bool ok = false;
    for (int ls = 0; ls < 40; ++ls) {
      double f1 = 0.0;
      if (frozen(cur.point.X, psi + alpha * p, f1) && f1 <= f0 + 1e-4 * alpha * g.dot(p)) {
        ok = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!ok) break;
    const Vec psi_new = psi + alpha * p;
    sc.upsilon = psi_new.array().exp();
    RelaxResult next = solve_relaxation(inst, MatrixKind::Glinx, region, sc, opts);
    total_iters += next.report.iterations;
    const Vec g_new = gscaled_glinx_gradient(inst.C, next.point.X, sc.upsilon);
    const Vec s = psi_new - psi;
    const Vec y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Mat I = Mat::Identity(n, n);
      Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    psi = psi_new;
    g = g_new;
    cur = next;
    if (cur.report.certified < out.report.certified) {
      out.report = cur.report;
      out.upsilon = sc.upsilon;
    }
    out.best_trace.push_back(out.report.certified);
  }
  out.last_gradient = g;
  out.report.scaling = "g";
  out.report.upsilon = out.upsilon;
  out.report.iterations = total_iters;
  out.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

Fixings fix_variables(const Vec& upsilon, const Vec& nu, double objective, double LB, const Vec& l, const Vec& c) {
  Fixings fx;
  const double gap = objective - LB;
  for (Eigen::Index j = 0; j < upsilon.size(); ++j) {
    if (l.size() && c.size() && l(j) == c(j)) continue;
    if (gap + 1e-9 < upsilon(j)) fx.F0.push_back(static_cast<int>(j));
    else if (gap + 1e-9 < nu(j)) fx.F1.push_back(static_cast<int>(j));
  }
  return fx;
}

Fixings fix_variables(const MatrixDualPoint& dual, double LB) {
  return fix_variables(dual.upsilon, dual.nu, dual.objective, LB);
}

double soc_gap_bound(const Mat& C, int s, int t) {
  const Vec lam = sym_eigenvalues(C);
  const int n = static_cast<int>(lam.size());
  if (!(lam(t - 1) > 1e-12 * std::max(1.0, lam(0)))) throw Error(ErrorCode::RankDeficient, "soc_gap_bound: lambda_t is zero");
  const double lt = lam(t - 1);
  auto g = [&](double u) { return std::sqrt(1.0 + (static_cast<double>(t) / n) * (u * u - 1.0)); };
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double kappa = std::max(0.0, lam(i)) / lt;
    if (i < t - 1) sum += std::log(kappa / g(kappa));
    else if (i > t - 1) sum += std::log(1.0 / g(kappa));
  }
  return sum / (1.0 + 4.0 * (s - t) / static_cast<double>(n));
}

}  // namespace gmesp
