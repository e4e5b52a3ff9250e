#include "gmesp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gmesp {

Vec sym_eigenvalues(const Mat& m) {
  const Mat sym = (m + m.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NonConvergence, "sym_eigenvalues: eigensolver did not converge");
  }
  return es.eigenvalues().reverse();
}

double rank_threshold(const Vec& desc_values) {
  const double top = desc_values.size() ? desc_values(0) : 0.0;
  return 1e-9 * std::max(1.0, top);
}

int numerical_rank(const Vec& desc_values) {
  const double thr = rank_threshold(desc_values);
  int r = 0;
  for (Eigen::Index i = 0; i < desc_values.size(); ++i)
    if (desc_values(i) > thr) ++r;
  return r;
}

double ldet_psd(const Mat& m) {
  const Vec lam = sym_eigenvalues(m);
  const Eigen::Index n = lam.size();
  if (n == 0) return 0.0;
  if (!(lam(n - 1) > 1e-12 * std::abs(lam(0)))) {
    throw Error(ErrorCode::NearSingular, "ldet_psd: matrix is not positive definite (lambda_min = " +
                                             std::to_string(lam(n - 1)) + ")");
  }
  return lam.array().log().sum();
}

bool ldet_chol(const Mat& m, double& value) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) return false;
  const Vec d = llt.matrixLLT().diagonal();
  if ((d.array() <= 0.0).any()) return false;
  value = 2.0 * d.array().log().sum();
  return std::isfinite(value);
}

double top_logeig_sum(const Vec& desc_values, int t) {
  if (t > desc_values.size()) throw Error(ErrorCode::RankDeficient, "fewer eigenvalues than t");
  const double thr = 1e-12 * std::max(1.0, desc_values.size() ? desc_values(0) : 0.0);
  if (t > 0 && !(desc_values(t - 1) > thr)) {
    throw Error(ErrorCode::RankDeficient, "lambda_t is numerically zero");
  }
  return desc_values.head(t).array().log().sum();
}

FactorSet factorize(const Mat& C) {
  const Spectrum sp = sym_eigen(C);
  const Eigen::Index n = C.rows();
  FactorSet fs;
  fs.lambda_max = sp.values(0);
  fs.lambda_min = sp.values(n - 1);
  fs.r = numerical_rank(sp.values);
  fs.F = sp.vectors.leftCols(fs.r) * sp.values.head(fs.r).cwiseSqrt().asDiagonal();

  const double tol_max = 1e-9 * std::max(1.0, fs.lambda_max);
  fs.mu_max = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (sp.values(i) >= fs.lambda_max - tol_max) ++fs.mu_max;
  fs.p = static_cast<int>(n) - fs.mu_max;
  fs.H = Mat(n, fs.p);
  for (int k = 0; k < fs.p; ++k) {
    const Eigen::Index i = fs.mu_max + k;
    fs.H.col(k) = sp.vectors.col(i) * std::sqrt(std::max(0.0, 1.0 - sp.values(i) / fs.lambda_max));
  }

  fs.has_G = fs.lambda_min > rank_threshold(sp.values);
  if (fs.has_G) {
    const double tol_min = 1e-9 * fs.lambda_min;
    fs.mu_min = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (sp.values(i) <= fs.lambda_min + tol_min) ++fs.mu_min;
    fs.q = static_cast<int>(n) - fs.mu_min;
    fs.G = Mat(n, fs.q);
    for (int k = 0; k < fs.q; ++k) {
      fs.G.col(k) = sp.vectors.col(k) * std::sqrt(std::max(0.0, sp.values(k) / fs.lambda_min - 1.0));
    }
  }
  return fs;
}

Vec greedy_budget(const Vec& c, const Vec& l, const Vec& u, double s) {
  const Eigen::Index n = c.size();
  Vec x = l;
  double rem = s - l.sum();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return c(a) > c(b); });
  for (Eigen::Index i : order) {
    if (rem <= 0.0) break;
    const double add = std::min(u(i) - l(i), rem);
    x(i) += add;
    rem -= add;
  }
  return x;
}

namespace {

// Dense tableau simplex, Bland's rule. Maximizes cost^T z, M z = h, z >= 0,
// h >= 0, with one artificial column per row appended after the structural columns.
class Tableau {
 public:
  Tableau(const Mat& M, const Vec& h) : rows_(M.rows()), cols_(M.cols()) {
    T_ = Mat::Zero(rows_, cols_ + rows_ + 1);
    T_.leftCols(cols_) = M;
    T_.block(0, cols_, rows_, rows_).setIdentity();
    T_.col(cols_ + rows_) = h;
    basis_.resize(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) basis_[i] = cols_ + i;
  }

  // Returns objective value; artificial columns may enter only if allow_art.
  double optimize(const Vec& cost_full, bool allow_art, int& pivots) {
    const Eigen::Index total = cols_ + rows_;
    Vec rc = cost_full;
    for (Eigen::Index i = 0; i < rows_; ++i) rc -= cost_full(basis_[i]) * T_.row(i).head(total).transpose();
    const double scale = 1.0 + cost_full.cwiseAbs().maxCoeff();
    const double tol = 1e-11 * scale;
    for (int guard = 0; guard < 100000; ++guard) {
      Eigen::Index enter = -1;
      const Eigen::Index limit = allow_art ? total : cols_;
      for (Eigen::Index j = 0; j < limit; ++j) {
        if (rc(j) > tol && !is_basic(j)) {
          enter = j;
          break;
        }
      }
      if (enter < 0) {
        rc_ = rc;
        double v = 0.0;
        for (Eigen::Index i = 0; i < rows_; ++i) v += cost_full(basis_[i]) * rhs(i);
        return v;
      }
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double a = T_(i, enter);
        if (a > 1e-12) {
          const double ratio = rhs(i) / a;
          if (leave < 0 || ratio < best - 1e-14 ||
              (std::abs(ratio - best) <= 1e-14 && basis_[i] < basis_[leave])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave < 0) throw Error(ErrorCode::Internal, "lp: unbounded direction under finite bounds");
      pivot(leave, enter);
      const double f = rc(enter);
      rc -= f * T_.row(leave).head(total).transpose();
      ++pivots;
    }
    throw Error(ErrorCode::NonConvergence, "lp: pivot limit reached");
  }

  void drive_out_artificials(int& pivots) {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[i] < cols_) continue;
      for (Eigen::Index j = 0; j < cols_; ++j) {
        if (!is_basic(j) && std::abs(T_(i, j)) > 1e-9) {
          pivot(i, j);
          ++pivots;
          break;
        }
      }
    }
  }

  double rhs(Eigen::Index i) const { return T_(i, cols_ + rows_); }
  const std::vector<Eigen::Index>& basis() const { return basis_; }
  const Vec& reduced_costs() const { return rc_; }
  Eigen::Index cols() const { return cols_; }

 private:
  bool is_basic(Eigen::Index j) const {
    return std::find(basis_.begin(), basis_.end(), j) != basis_.end();
  }
  void pivot(Eigen::Index r, Eigen::Index c) {
    T_.row(r) /= T_(r, c);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (i != r && T_(i, c) != 0.0) T_.row(i) -= T_(i, c) * T_.row(r);
    }
    basis_[r] = c;
  }

  Eigen::Index rows_;
  Eigen::Index cols_;
  Mat T_;
  std::vector<Eigen::Index> basis_;
  Vec rc_;
};

}  // namespace

LpResult lp_solve(const LinearProgram& lp) {
  const Eigen::Index n = lp.c.size();
  const Eigen::Index me = lp.Aeq.rows();
  const Eigen::Index mi = lp.Ain.rows();
  const Vec u = lp.hi - lp.lo;
  if ((u.array() < -1e-12).any()) throw Error(ErrorCode::Infeasible, "lp: lower bound exceeds upper bound");

  std::vector<Eigen::Index> var;
  for (Eigen::Index j = 0; j < n; ++j)
    if (u(j) > 1e-12) var.push_back(j);
  const Eigen::Index nv = static_cast<Eigen::Index>(var.size());

  const Eigen::Index R = me + mi + nv;
  const Eigen::Index ncol = nv + mi + nv;
  Mat M = Mat::Zero(R, ncol);
  Vec h(R);
  const Vec beq_shift = me ? Vec(lp.beq - lp.Aeq * lp.lo) : Vec();
  const Vec bin_shift = mi ? Vec(lp.bin - lp.Ain * lp.lo) : Vec();
  for (Eigen::Index i = 0; i < me; ++i) {
    for (Eigen::Index k = 0; k < nv; ++k) M(i, k) = lp.Aeq(i, var[k]);
    h(i) = beq_shift(i);
  }
  for (Eigen::Index i = 0; i < mi; ++i) {
    for (Eigen::Index k = 0; k < nv; ++k) M(me + i, k) = lp.Ain(i, var[k]);
    M(me + i, nv + i) = 1.0;
    h(me + i) = bin_shift(i);
  }
  for (Eigen::Index k = 0; k < nv; ++k) {
    M(me + mi + k, k) = 1.0;
    M(me + mi + k, nv + mi + k) = 1.0;
    h(me + mi + k) = u(var[k]);
  }
  Vec flip = Vec::Ones(R);
  for (Eigen::Index i = 0; i < R; ++i) {
    if (h(i) < 0.0) {
      flip(i) = -1.0;
      M.row(i) *= -1.0;
      h(i) = -h(i);
    }
  }

  LpResult res;
  Tableau tab(M, h);
  Vec phase1 = Vec::Zero(ncol + R);
  phase1.tail(R).setConstant(-1.0);
  const double infeas = tab.optimize(phase1, false, res.pivots);
  if (infeas < -1e-8 * (1.0 + h.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::Infeasible, "lp: infeasible constraint system");
  }
  tab.drive_out_artificials(res.pivots);

  Vec phase2 = Vec::Zero(ncol + R);
  for (Eigen::Index k = 0; k < nv; ++k) phase2(k) = lp.c(var[k]);
  tab.optimize(phase2, false, res.pivots);

  Vec z = Vec::Zero(ncol + R);
  for (Eigen::Index i = 0; i < R; ++i) z(tab.basis()[i]) = tab.rhs(i);
  res.x = lp.lo;
  for (Eigen::Index k = 0; k < nv; ++k) res.x(var[k]) += std::clamp(z(k), 0.0, u(var[k]));
  res.value = lp.c.dot(res.x);

  const Vec& rc = tab.reduced_costs();
  Vec yrow(R);
  for (Eigen::Index i = 0; i < R; ++i) yrow(i) = -rc(ncol + i) * flip(i);
  res.y_eq = yrow.head(me);
  res.y_in = yrow.segment(me, mi).cwiseMax(0.0);
  res.r_hi = Vec::Zero(n);
  res.r_lo = Vec::Zero(n);
  for (Eigen::Index k = 0; k < nv; ++k) {
    res.r_hi(var[k]) = std::max(0.0, yrow(me + mi + k));
    res.r_lo(var[k]) = std::max(0.0, -rc(k));
  }
  // Fixed coordinates: split the residual between the two bound multipliers.
  for (Eigen::Index j = 0; j < n; ++j) {
    if (u(j) > 1e-12) continue;
    double r = lp.c(j);
    if (me) r -= lp.Aeq.col(j).dot(res.y_eq);
    if (mi) r -= lp.Ain.col(j).dot(res.y_in);
    res.r_hi(j) = std::max(0.0, r);
    res.r_lo(j) = std::max(0.0, -r);
  }
  return res;
}

LpResult lp_maximize_with_duals(const Vec& c, const Vec& l, const Vec& u, double s, const Mat& A,
                                const Vec& b) {
  LinearProgram lp;
  lp.c = c;
  lp.lo = l;
  lp.hi = u;
  lp.Aeq = Mat::Ones(1, c.size());
  lp.beq = Vec::Constant(1, s);
  lp.Ain = A;
  lp.bin = b;
  return lp_solve(lp);
}

Vec lp_maximize(const Vec& c, const Vec& l, const Vec& u, double s, const Mat& A, const Vec& b) {
  if (l.sum() > s + 1e-9 || u.sum() < s - 1e-9 || (l.array() > u.array() + 1e-12).any()) {
    throw Error(ErrorCode::Infeasible, "lp_maximize: budget outside box range");
  }
  if (A.rows() == 0) return greedy_budget(c, l, u, s);
  return lp_maximize_with_duals(c, l, u, s, A, b).x;
}

}  // namespace gmesp
