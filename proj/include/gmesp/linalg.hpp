#ifndef GMESP_LINALG_HPP
#define GMESP_LINALG_HPP

#include <Eigen/Dense>
#include <vector>

#include "gmesp/error.hpp"

namespace gmesp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Eigen-decomposition with eigenvalues sorted descending.
template <typename Scalar>
struct SpectrumT {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
};
using Spectrum = SpectrumT<double>;

template <typename Derived>
SpectrumT<typename Derived::Scalar> sym_eigen(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using MatS = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const MatS sym = (m + m.transpose()) / Scalar(2);
  if (!sym.allFinite()) throw Error(ErrorCode::InvariantViolation, "sym_eigen: non-finite entries");
  Eigen::SelfAdjointEigenSolver<MatS> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NonConvergence, "sym_eigen: eigensolver did not converge");
  }
  SpectrumT<Scalar> out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

// Eigenvalues only, descending.
Vec sym_eigenvalues(const Mat& m);

// Numerical rank: eigenvalues above 1e-9 * max(1, lambda_1).
int numerical_rank(const Vec& desc_values);
double rank_threshold(const Vec& desc_values);

// Sum of log eigenvalues of a positive-definite matrix.
double ldet_psd(const Mat& m);

// Log-determinant through Cholesky; returns false when m is not positive definite.
bool ldet_chol(const Mat& m, double& value);

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> project_psd(
    const Eigen::MatrixBase<Derived>& m) {
  auto sp = sym_eigen(m);
  auto clamped = sp.values.cwiseMax(typename Derived::Scalar(0));
  return sp.vectors * clamped.asDiagonal() * sp.vectors.transpose();
}

// Factorizations C = F F^T, I - C/lambda_max = H H^T, C/lambda_min - I = G G^T.
struct FactorSet {
  Mat F;
  Mat H;
  Mat G;
  int r = 0;
  int p = 0;
  int q = 0;
  bool has_G = false;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  int mu_max = 0;
  int mu_min = 0;
};

FactorSet factorize(const Mat& C);

// Sum of the t largest log eigenvalues.
double top_logeig_sum(const Vec& desc_values, int t);

// Linear programs: maximize c^T x subject to Aeq x = beq, Ain x <= bin,
// lo <= x <= hi (all bounds finite).
struct LinearProgram {
  Vec c;
  Vec lo;
  Vec hi;
  Mat Aeq;
  Vec beq;
  Mat Ain;
  Vec bin;
};

// Optimal vertex and dual multipliers. At optimality
// c = Aeq^T y_eq + Ain^T y_in + r_hi - r_lo with y_in, r_hi, r_lo >= 0.
struct LpResult {
  Vec x;
  double value = 0.0;
  Vec y_eq;
  Vec y_in;
  Vec r_lo;
  Vec r_hi;
  int pivots = 0;
};

LpResult lp_solve(const LinearProgram& lp);

// max c^T x s.t. e^T x = s, A x <= b, l <= x <= u. Greedy when A is empty.
Vec lp_maximize(const Vec& c, const Vec& l, const Vec& u, double s, const Mat& A, const Vec& b);
LpResult lp_maximize_with_duals(const Vec& c, const Vec& l, const Vec& u, double s, const Mat& A,
                                const Vec& b);

// Greedy solution of the budget LP with box bounds only.
Vec greedy_budget(const Vec& c, const Vec& l, const Vec& u, double s);

}  // namespace gmesp

#endif  // GMESP_LINALG_HPP
