#ifndef GMESP_GAMMA_HPP
#define GMESP_GAMMA_HPP

#include "gmesp/linalg.hpp"

namespace gmesp {

struct NikolovIndex {
  int i = 0;
  double delta = 0.0;
};

// Unique i in [0, t) with omega_i > (1/(t-i)) sum_{l>i} omega_l >= omega_{i+1}
// (1-based omega, omega_0 = +inf).
NikolovIndex nikolov_index(const Vec& omega, int t);

struct GammaEval {
  int i_hat = 0;
  double delta = 0.0;
  double value = 0.0;
  int rank = 0;
  Vec beta;
  Mat Theta;
  Spectrum spectrum;
};

inline constexpr double kGammaEpsilon = 1e-8;

GammaEval gamma_value(const Mat& X, int t);

// Gamma_t(F^T Diag(x) F).
GammaEval gamma_of_factor(const Mat& F, const Vec& x, int t);

// d = diag(F Theta F^T) at x.
Vec gamma_supergradient(const Mat& F, const Vec& x, int t);

}  // namespace gmesp

#endif  // GMESP_GAMMA_HPP
