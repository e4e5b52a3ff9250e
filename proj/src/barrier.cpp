#include "barrier.hpp"

#include <algorithm>
#include <cmath>

namespace gmesp::detail {

namespace {

struct SparseEntry {
  int index;
  double value;
};

}  // namespace

Barrier::Barrier(const Instance& inst, const Model& md, const RegionSpec& region)
    : inst_(inst), md_(md), region_(region) {
  const int n = inst.n();
  xfix_ = inst.l;
  double fixed_sum = 0.0;
  std::vector<int> cand;
  for (int i = 0; i < n; ++i) {
    if (inst.l(i) < inst.c(i))
      cand.push_back(i);
    else
      fixed_sum += inst.l(i);
  }
  budget_ = inst.s - fixed_sum;
  const double nc = static_cast<double>(cand.size());
  if (!cand.empty() && budget_ <= 1e-12) {
    for (int i : cand) xfix_(i) = 0.0;
  } else if (!cand.empty() && budget_ >= nc - 1e-12) {
    for (int i : cand) xfix_(i) = 1.0;
  } else {
    free_ = cand;
  }
  if (free_.empty() && std::abs(xfix_.sum() - inst.s) > 1e-9)
    throw Error(ErrorCode::Infeasible, "box bounds incompatible with the budget");

  const bool row_link = region.upper == UpperBound::DiagX || region.soc_rows;
  forced_ = inst.t == inst.s && row_link;
  local_.assign(n, -1);
  std::vector<char> is_free(n, 0);
  for (int i : free_) is_free[i] = 1;
  for (int i = 0; i < n; ++i) {
    if (!forced_ && row_link && !is_free[i] && xfix_(i) == 0.0) continue;
    local_[i] = static_cast<int>(J_.size());
    J_.push_back(i);
  }
  const int nJ = static_cast<int>(J_.size());
  if (!forced_ && inst.t >= nJ) throw Error(ErrorCode::NearSingular, "region has no interior (t >= |support|)");

  for (const Mat& M : md.M) {
    Mat MJ(M.rows(), nJ);
    for (int a = 0; a < nJ; ++a) MJ.col(a) = M.col(J_[a]);
    MJ_.push_back(MJ);
  }
  if (md.lin.size()) {
    linJ_ = Mat(nJ, nJ);
    for (int a = 0; a < nJ; ++a)
      for (int b = 0; b < nJ; ++b) linJ_(a, b) = md.lin(J_[a], J_[b]);
  }

  nF_ = static_cast<int>(free_.size());
  if (!forced_) {
    pidx_ = Eigen::MatrixXi::Constant(nJ, nJ, -1);
    for (int a = 0; a < nJ; ++a)
      for (int b = a; b < nJ; ++b) {
        pidx_(a, b) = pidx_(b, a) = static_cast<int>(pairs_.size());
        pairs_.emplace_back(a, b);
      }
    mX_ = static_cast<int>(pairs_.size());
  }
  const int rows = (forced_ ? 0 : 1) + (nF_ > 0 ? 1 : 0);
  Aeq_ = Mat::Zero(rows, dim());
  int r = 0;
  if (!forced_) {
    for (int a = 0; a < nJ; ++a) Aeq_(r, pidx_(a, a)) = 1.0;
    ++r;
  }
  if (nF_ > 0) Aeq_.block(r, forced_ ? 0 : mX_, 1, nF_).setOnes();
}

Vec Barrier::x_of(const Vec& v) const {
  Vec x = xfix_;
  const int off = forced_ ? 0 : mX_;
  for (int f = 0; f < nF_; ++f) x(free_[f]) = v(off + f);
  return x;
}

Mat Barrier::XJ_of(const Vec& v) const {
  const int nJ = static_cast<int>(J_.size());
  Mat X(nJ, nJ);
  for (int P = 0; P < mX_; ++P) {
    const auto [a, b] = pairs_[P];
    X(a, b) = X(b, a) = v(P);
  }
  return X;
}

Mat Barrier::X_of(const Vec& v) const {
  const int n = inst_.n();
  if (forced_) return Mat(x_of(v).asDiagonal());
  Mat X = Mat::Zero(n, n);
  const Mat XJ = XJ_of(v);
  for (std::size_t a = 0; a < J_.size(); ++a)
    for (std::size_t b = 0; b < J_.size(); ++b) X(J_[a], J_[b]) = XJ(a, b);
  return X;
}

Vec Barrier::initial_point() const {
  Vec x = xfix_;
  if (nF_ > 0) {
    if (inst_.m() == 0) {
      for (int i : free_) x(i) = budget_ / nF_;
    } else {
      // Maximize the smallest slack over the free coordinates.
      const int m = inst_.m();
      LinearProgram lp;
      lp.c = Vec::Zero(nF_ + 1);
      lp.c(nF_) = 1.0;
      lp.lo = Vec::Zero(nF_ + 1);
      lp.hi = Vec::Ones(nF_ + 1);
      lp.hi(nF_) = 0.5;
      lp.Aeq = Mat::Zero(1, nF_ + 1);
      lp.Aeq.leftCols(nF_).setOnes();
      lp.beq = Vec::Constant(1, budget_);
      lp.Ain = Mat::Zero(m + 2 * nF_, nF_ + 1);
      lp.bin = Vec::Zero(m + 2 * nF_);
      const Vec rhs = inst_.b - inst_.A * xfix_;
      for (int f = 0; f < nF_; ++f) {
        lp.Ain.block(0, f, m, 1) = inst_.A.col(free_[f]);
        lp.Ain(m + f, f) = -1.0;
        lp.Ain(m + f, nF_) = 1.0;
        lp.Ain(m + nF_ + f, f) = 1.0;
        lp.Ain(m + nF_ + f, nF_) = 1.0;
        lp.bin(m + nF_ + f) = 1.0;
      }
      // Free coordinates are counted in rhs through xfix_ = l = 0.
      lp.Ain.block(0, nF_, m, 1).setOnes();
      lp.bin.head(m) = rhs;
      const LpResult res = lp_solve(lp);
      if (res.x(nF_) < 1e-7) throw Error(ErrorCode::Infeasible, "side constraints have no strictly feasible point");
      for (int f = 0; f < nF_; ++f) x(free_[f]) = res.x(f);
    }
  } else if (inst_.m() > 0 && ((inst_.A * x - inst_.b).array() > 1e-9).any()) {
    throw Error(ErrorCode::Infeasible, "fixed variables violate the side constraints");
  }

  Vec v(dim());
  const int off = forced_ ? 0 : mX_;
  for (int f = 0; f < nF_; ++f) v(off + f) = x(free_[f]);
  if (!forced_) {
    const int nJ = static_cast<int>(J_.size());
    Mat X0 = Mat::Zero(nJ, nJ);
    if (region_.upper == UpperBound::Identity && !region_.soc_rows) {
      X0.diagonal().setConstant(static_cast<double>(inst_.t) / nJ);
    } else {
      double sJ = 0.0;
      for (int i : J_) sJ += x(i);
      for (int a = 0; a < nJ; ++a) X0(a, a) = inst_.t / sJ * x(J_[a]);
    }
    for (int P = 0; P < mX_; ++P) v(P) = X0(pairs_[P].first, pairs_[P].second);
  }
  return v;
}

bool Barrier::value(const Vec& v, double mu, double& phi) const { return evaluate(v, mu, 0, phi, nullptr, nullptr); }

bool Barrier::derivatives(const Vec& v, double mu, double& phi, Vec& g, Mat& H) const {
  return evaluate(v, mu, 2, phi, &g, &H);
}

namespace {

// Adds w times the derivatives of ldet(K) with K affine in svec(X), given
// N[k][l] = B_k^T K^{-1} B_l and coefficients a_k of the terms a_k B_k X B_k^T.
void add_logdet_block(const std::vector<std::pair<int, int>>& pairs, const std::vector<std::vector<Mat>>& N,
                      const std::vector<double>& a, double w, Vec& g, Mat& H) {
  const int mX = static_cast<int>(pairs.size());
  const std::size_t K = a.size();
  for (int P = 0; P < mX; ++P) {
    const int i = pairs[P].first;
    const int j = pairs[P].second;
    double gr = 0.0;
    for (std::size_t k = 0; k < K; ++k) gr += a[k] * (i == j ? N[k][k](i, i) : 2.0 * N[k][k](i, j));
    g(P) += w * gr;
    const double sP = i == j ? 0.5 : 1.0;
    for (int Q = P; Q < mX; ++Q) {
      const int c = pairs[Q].first;
      const int d = pairs[Q].second;
      const double sQ = c == d ? 0.5 : 1.0;
      double h = 0.0;
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t l = 0; l < K; ++l) {
          const Mat& Nk = N[k][l];
          h += a[k] * a[l] * (Nk(j, c) * Nk(i, d) + Nk(j, d) * Nk(i, c));
        }
      const double val = -2.0 * sP * sQ * h * w;
      H(P, Q) += val;
      if (Q != P) H(Q, P) += val;
    }
  }
}

bool chol_inverse(const Mat& M, double& ld, Mat* inv) {
  Eigen::LLT<Mat> llt(M);
  if (llt.info() != Eigen::Success) return false;
  const Mat L = llt.matrixL();
  const auto d = L.diagonal();
  if ((d.array() <= 0.0).any()) return false;
  ld = 2.0 * d.array().log().sum();
  if (!std::isfinite(ld)) return false;
  if (inv) *inv = llt.solve(Mat::Identity(M.rows(), M.cols()));
  return true;
}

}  // namespace

bool Barrier::evaluate(const Vec& v, double mu, int order, double& phi, Vec* gp, Mat* Hp) const {
  if (!v.allFinite()) return false;
  const Vec x = x_of(v);
  const int n = inst_.n();
  const int nJ = static_cast<int>(J_.size());
  const int off = forced_ ? 0 : mX_;
  const bool want = order > 0;
  if (want) {
    gp->setZero(dim());
    Hp->setZero(dim(), dim());
  }

  // Objective.
  Mat XJ = forced_ ? Mat(x.asDiagonal()) : XJ_of(v);
  double ldK = 0.0;
  Mat Kinv;
  if (md_.p > 0) {
    Mat K = Mat::Identity(md_.p, md_.p);
    for (std::size_t k = 0; k < MJ_.size(); ++k) K += md_.a[k] * MJ_[k] * XJ * MJ_[k].transpose();
    K = (K + K.transpose()) / 2.0;
    if (!chol_inverse(K, ldK, want ? &Kinv : nullptr)) return false;
  }
  double f = md_.alpha * ldK + md_.offset;
  if (linJ_.size()) f += linJ_.cwiseProduct(XJ).sum();
  phi = -f;

  std::vector<std::vector<Mat>> NK;
  if (want && md_.p > 0) {
    const std::size_t K = MJ_.size();
    NK.assign(K, std::vector<Mat>(K));
    std::vector<Mat> KM(K);
    for (std::size_t k = 0; k < K; ++k) KM[k] = Kinv * MJ_[k];
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t l = 0; l < K; ++l) NK[k][l] = MJ_[k].transpose() * KM[l];
  }

  if (forced_) {
    if (want) {
      Vec& g = *gp;
      Mat& H = *Hp;
      for (int f1 = 0; f1 < nF_; ++f1) {
        const int i = free_[f1];
        double gr = 0.0;
        if (md_.p > 0)
          for (std::size_t k = 0; k < NK.size(); ++k) gr += md_.a[k] * NK[k][k](i, i);
        g(f1) -= md_.alpha * gr;
        if (linJ_.size()) g(f1) -= linJ_(i, i);
        for (int f2 = 0; f2 < nF_; ++f2) {
          const int j = free_[f2];
          double h = 0.0;
          if (md_.p > 0)
            for (std::size_t k = 0; k < NK.size(); ++k)
              for (std::size_t l = 0; l < NK.size(); ++l) h += md_.a[k] * md_.a[l] * NK[k][l](i, j) * NK[k][l](i, j);
          H(f1, f2) += md_.alpha * h;
        }
      }
    }
  } else {
    if (want && md_.p > 0) add_logdet_block(pairs_, NK, md_.a, -md_.alpha, *gp, *Hp);
    if (want && linJ_.size())
      for (int P = 0; P < mX_; ++P) {
        const auto [a, b] = pairs_[P];
        (*gp)(P) -= linJ_(a, b) * (a == b ? 1.0 : 2.0);
      }

    // X > 0.
    double ld = 0.0;
    Mat inv;
    if (!chol_inverse(XJ, ld, want ? &inv : nullptr)) return false;
    phi -= mu * ld;
    if (want) add_logdet_block(pairs_, {{inv}}, {1.0}, -mu, *gp, *Hp);

    // Diag(x) - X > 0 or I - X > 0.
    Mat S = -XJ;
    if (region_.upper == UpperBound::DiagX)
      for (int a = 0; a < nJ; ++a) S(a, a) += x(J_[a]);
    else
      S.diagonal().array() += 1.0;
    if (!chol_inverse(S, ld, want ? &inv : nullptr)) return false;
    phi -= mu * ld;
    if (want) {
      add_logdet_block(pairs_, {{inv}}, {-1.0}, -mu, *gp, *Hp);
      if (region_.upper == UpperBound::DiagX) {
        Vec& g = *gp;
        Mat& H = *Hp;
        for (int f1 = 0; f1 < nF_; ++f1) {
          const int a = local_[free_[f1]];
          g(off + f1) += -mu * inv(a, a);
          for (int f2 = 0; f2 < nF_; ++f2) {
            const int b = local_[free_[f2]];
            H(off + f1, off + f2) += mu * inv(a, b) * inv(a, b);
          }
          for (int P = 0; P < mX_; ++P) {
            const auto [c, d] = pairs_[P];
            const double val = -mu * (c == d ? 1.0 : 2.0) * inv(a, c) * inv(a, d);
            H(off + f1, P) += val;
            H(P, off + f1) += val;
          }
        }
      }
    }

    // Row norms ||X_a.|| <= x_a.
    if (region_.soc_rows) {
      std::vector<int> fpos(n, -1);
      for (int f1 = 0; f1 < nF_; ++f1) fpos[free_[f1]] = f1;
      std::vector<SparseEntry> grad;
      for (int a = 0; a < nJ; ++a) {
        const double xa = x(J_[a]);
        const double gv = xa * xa - XJ.row(a).squaredNorm();
        if (!(xa > 0.0) || !(gv > 0.0)) return false;
        phi -= mu * std::log(gv);
        if (!want) continue;
        grad.clear();
        const int fx = fpos[J_[a]];
        if (fx >= 0) grad.push_back({off + fx, 2.0 * xa});
        for (int b = 0; b < nJ; ++b) grad.push_back({pidx_(a, b), -2.0 * XJ(a, b)});
        Vec& g = *gp;
        Mat& H = *Hp;
        for (const auto& e : grad) {
          g(e.index) -= mu * e.value / gv;
          for (const auto& e2 : grad) H(e.index, e2.index) += mu * e.value * e2.value / (gv * gv);
        }
        if (fx >= 0) H(off + fx, off + fx) -= mu * 2.0 / gv;
        for (int b = 0; b < nJ; ++b) H(pidx_(a, b), pidx_(a, b)) += mu * 2.0 / gv;
      }
    }
  }

  // Box bounds on free coordinates.
  for (int f1 = 0; f1 < nF_; ++f1) {
    const int i = free_[f1];
    const double lo = x(i) - inst_.l(i);
    const double hi = inst_.c(i) - x(i);
    if (!(lo > 0.0) || !(hi > 0.0)) return false;
    phi -= mu * (std::log(lo) + std::log(hi));
    if (want) {
      (*gp)(off + f1) += mu * (-1.0 / lo + 1.0 / hi);
      (*Hp)(off + f1, off + f1) += mu * (1.0 / (lo * lo) + 1.0 / (hi * hi));
    }
  }

  // Side constraints.
  if (inst_.m() > 0 && nF_ > 0) {
    const Vec slack = inst_.b - inst_.A * x;
    for (int r = 0; r < inst_.m(); ++r) {
      if (!(slack(r) > 0.0)) return false;
      phi -= mu * std::log(slack(r));
      if (!want) continue;
      for (int f1 = 0; f1 < nF_; ++f1) {
        const double a1 = inst_.A(r, free_[f1]);
        if (a1 == 0.0) continue;
        (*gp)(off + f1) += mu * a1 / slack(r);
        for (int f2 = 0; f2 < nF_; ++f2)
          (*Hp)(off + f1, off + f2) += mu * a1 * inst_.A(r, free_[f2]) / (slack(r) * slack(r));
      }
    }
  }
  return std::isfinite(phi);
}

BarrierMultipliers Barrier::multipliers(const Vec& v, double mu) const {
  BarrierMultipliers out;
  out.mu = mu;
  out.support = J_;
  if (forced_) return out;
  const int n = inst_.n();
  const int nJ = static_cast<int>(J_.size());
  const Vec x = x_of(v);
  const Mat XJ = XJ_of(v);
  Mat S = -XJ;
  if (region_.upper == UpperBound::DiagX)
    for (int a = 0; a < nJ; ++a) S(a, a) += x(J_[a]);
  else
    S.diagonal().array() += 1.0;
  double ld = 0.0;
  Mat inv;
  if (!chol_inverse(S, ld, &inv)) return out;
  out.Z = Mat::Zero(n, n);
  out.W = Mat::Zero(n, n);
  out.eta = Vec::Zero(n);
  for (int a = 0; a < nJ; ++a)
    for (int b = 0; b < nJ; ++b) out.Z(J_[a], J_[b]) = mu * inv(a, b);
  if (region_.soc_rows) {
    for (int a = 0; a < nJ; ++a) {
      const double xa = x(J_[a]);
      const double gv = xa * xa - XJ.row(a).squaredNorm();
      out.eta(J_[a]) = 2.0 * mu * xa / gv;
      for (int b = 0; b < nJ; ++b) out.W(J_[a], J_[b]) = 2.0 * mu * XJ(a, b) / gv;
    }
  }
  out.valid = true;
  return out;
}

PathResult follow_path(const Barrier& barrier, const SolverOptions& opts) {
  PathResult res;
  res.v = barrier.initial_point();
  const int dim = barrier.dim();
  res.mu = opts.mu0;
  if (dim == 0) return res;
  const Mat& Aeq = barrier.equality_matrix();
  Mat N;
  if (Aeq.rows() > 0) {
    Eigen::HouseholderQR<Mat> qr(Aeq.transpose());
    const Mat Q = qr.householderQ();
    N = Q.rightCols(dim - Aeq.rows());
  } else {
    N = Mat::Identity(dim, dim);
  }
  if (N.cols() == 0) return res;

  double mu = opts.mu0;
  Vec g;
  Mat H;
  while (true) {
    for (int it = 0; it < opts.max_newton; ++it) {
      double phi = 0.0;
      if (!barrier.derivatives(res.v, mu, phi, g, H)) {
        res.converged = false;
        break;
      }
      const Mat Hr = N.transpose() * H * N;
      const Vec gr = N.transpose() * g;
      Eigen::LDLT<Mat> ldlt(Hr);
      Vec u = -ldlt.solve(gr);
      if (!u.allFinite()) {
        Mat Hreg = Hr;
        Hreg.diagonal().array() += 1e-12 * (1.0 + Hr.diagonal().cwiseAbs().maxCoeff());
        u = -Eigen::LDLT<Mat>(Hreg).solve(gr);
      }
      const Vec step = N * u;
      const double dec = -g.dot(step);
      ++res.newton_steps;
      const double grad_tol = 1e-10 * (1.0 + std::abs(phi));
      if (!(dec > 0.0) || (dec / 2.0 <= opts.newton_tol && gr.cwiseAbs().maxCoeff() <= grad_tol)) break;
      double alpha = 1.0;
      bool accepted = false;
      if (dec < 1e-8) {
        // Quadratic regime: the Armijo test is below the resolution of phi.
        double phin = 0.0;
        const Vec vn = res.v + step;
        if (barrier.value(vn, mu, phin)) {
          Vec gn;
          Mat Hn;
          barrier.derivatives(vn, mu, phin, gn, Hn);
          if ((N.transpose() * gn).cwiseAbs().maxCoeff() < gr.cwiseAbs().maxCoeff()) {
            res.v = vn;
            continue;
          }
        }
        break;
      }
      const double slack = 1e-15 * (1.0 + std::abs(phi));
      while (alpha > 1e-14) {
        double phin = 0.0;
        const Vec vn = res.v + alpha * step;
        if (barrier.value(vn, mu, phin) && phin <= phi - 0.25 * alpha * dec + slack) {
          res.v = vn;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        if (dec > 1e-6) res.converged = false;
        break;
      }
    }
    res.mu = mu;
    if (mu <= opts.mu_min * (1.0 + 1e-12)) break;
    mu = std::max(mu / opts.mu_factor, opts.mu_min);
  }
  return res;
}

}  // namespace gmesp::detail
