#ifndef GMESP_TESTS_HELPERS_HPP
#define GMESP_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gmesp/instance.hpp"
#include "gmesp/linalg.hpp"

namespace helpers {

using gmesp::Instance;
using gmesp::Mat;
using gmesp::Vec;

inline Mat random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) M(i, j) = M(j, i) = normal(rng);
  return M;
}

inline Mat random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(G);
  return qr.householderQ() * Mat::Identity(n, n);
}

// Q diag(lambda) Q^T for a random orthogonal Q.
inline Mat with_spectrum(const Vec& lambda, std::mt19937_64& rng) {
  const Mat Q = random_orthogonal(static_cast<int>(lambda.size()), rng);
  Mat C = Q * lambda.asDiagonal() * Q.transpose();
  return (C + C.transpose()) / 2.0;
}

// Spectrum with the top eigenvalue repeated mult times, the rest uniform in [0.5, 3].
inline Mat top_multiplicity(int n, int mult, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.5, 3.0);
  Vec lam(n);
  for (int i = 0; i < n; ++i) lam(i) = i < mult ? 4.0 : unif(rng);
  return with_spectrum(lam, rng);
}

// Spectrum with the bottom eigenvalue repeated mult times, the rest uniform in [1.5, 5].
inline Mat bottom_multiplicity(int n, int mult, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(1.5, 5.0);
  Vec lam(n);
  for (int i = 0; i < n; ++i) lam(i) = i < mult ? 1.0 : unif(rng);
  return with_spectrum(lam, rng);
}

inline std::vector<int> random_subset(int n, int s, std::mt19937_64& rng) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(s);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline Vec random_feasible_binary(const Instance& inst, std::mt19937_64& rng) {
  for (int tries = 0; tries < 10000; ++tries) {
    const Vec x = gmesp::indicator(inst.n(), random_subset(inst.n(), inst.s, rng));
    if (gmesp::is_feasible_binary(inst, x)) return x;
  }
  return gmesp::brute_force(inst).x;
}

// Convex combination of lifted binary points and (x, (t/s) Diag(x)); lies in P(n,s,t).
inline gmesp::RelaxPoint random_relax_point(const Instance& inst, std::mt19937_64& rng, int pieces = 3) {
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  gmesp::RelaxPoint p{Vec::Zero(inst.n()), Mat::Zero(inst.n(), inst.n())};
  double total = 0.0;
  std::vector<std::pair<double, gmesp::RelaxPoint>> parts;
  for (int k = 0; k < pieces; ++k) {
    const double w = unif(rng);
    parts.emplace_back(w, gmesp::binary_to_projector(inst, random_feasible_binary(inst, rng)));
    total += w;
  }
  for (const auto& [w, q] : parts) {
    p.x += (w / total) * q.x;
    p.X += (w / total) * q.X;
  }
  const double mix = 0.3;
  p.X = (1.0 - mix) * p.X + mix * (double(inst.t) / inst.s) * Mat(p.x.asDiagonal());
  return p;
}

}  // namespace helpers

#endif  // GMESP_TESTS_HELPERS_HPP
