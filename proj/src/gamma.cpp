#include "gmesp/gamma.hpp"

#include <cmath>

namespace gmesp {

NikolovIndex nikolov_index(const Vec& omega, int t) {
  const Eigen::Index k = omega.size();
  if (t <= 0 || t > k) throw Error(ErrorCode::InvariantViolation, "nikolov_index: need 0 < t <= k");
  // tail(i) = omega.tail(k - i).sum(), accumulated from the small end
  Vec tails(k + 1);
  tails(k) = 0.0;
  for (Eigen::Index l = k - 1; l >= 0; --l) tails(l) = tails(l + 1) + omega(l);
  for (int i = 0; i < t; ++i) {
    const double tail = tails(i);
    const double avg = tail / (t - i);
    // First i with avg >= omega_{i+1}; the left inequality then holds automatically.
    if (avg >= omega(i) || i == t - 1) {
      if (!(tail > 0.0)) throw Error(ErrorCode::DegenerateSpectrum, "nikolov_index: zero tail sum");
      return {i, avg};
    }
  }
  throw Error(ErrorCode::Internal, "nikolov_index: no index found");
}

GammaEval gamma_value(const Mat& X, int t) {
  GammaEval g;
  g.spectrum = sym_eigen(X);
  const Vec omega = g.spectrum.values.cwiseMax(0.0);
  const Eigen::Index k = omega.size();
  const NikolovIndex ni = nikolov_index(omega, t);
  g.i_hat = ni.i;
  g.delta = ni.delta;
  g.rank = numerical_rank(omega);
  if (g.i_hat > 0 && !(omega(g.i_hat - 1) > 0.0))
    throw Error(ErrorCode::DegenerateSpectrum, "gamma_value: zero eigenvalue among leading block");
  g.value = (t - g.i_hat) * std::log(g.delta);
  for (int l = 0; l < g.i_hat; ++l) g.value += std::log(omega(l));
  g.beta = Vec(k);
  for (Eigen::Index l = 0; l < k; ++l) {
    if (l < g.i_hat)
      g.beta(l) = 1.0 / omega(l);
    else if (l < g.rank)
      g.beta(l) = 1.0 / g.delta;
    else
      g.beta(l) = (1.0 + kGammaEpsilon) / g.delta;
  }
  g.Theta = g.spectrum.vectors * g.beta.asDiagonal() * g.spectrum.vectors.transpose();
  return g;
}

GammaEval gamma_of_factor(const Mat& F, const Vec& x, int t) {
  return gamma_value(Mat(F.transpose() * x.asDiagonal() * F), t);
}

Vec gamma_supergradient(const Mat& F, const Vec& x, int t) {
  const GammaEval g = gamma_of_factor(F, x, t);
  return (F * g.Theta).cwiseProduct(F).rowwise().sum();
}

}  // namespace gmesp
