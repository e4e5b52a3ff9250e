#include "gmesp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gmesp {

double spectral_bound(const Mat& C, int t) { return top_logeig_sum(sym_eigenvalues(C), t); }

namespace {

struct Evaluation {
  SpectralBoundResult res;
  Vec subgradient;
};

Evaluation evaluate(const Instance& inst, const Vec& pi) {
  const int n = inst.n();
  const int m = inst.m();
  const Vec beta = m ? Vec(inst.A.transpose() * pi) : Vec(Vec::Zero(n));
  const Vec d = (-0.5 * beta).array().exp();
  const Mat DCD = d.asDiagonal() * inst.C * d.asDiagonal();
  const Spectrum sp = sym_eigen(DCD);

  Evaluation ev;
  ev.res.pi = pi;
  ev.res.value = top_logeig_sum(sp.values, inst.t);
  if (m) ev.res.value += pi.dot(inst.b);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return beta(a) < beta(b); });
  ev.res.K.assign(order.begin(), order.begin() + (inst.s - inst.t));
  std::sort(ev.res.K.begin(), ev.res.K.end());
  for (int j : ev.res.K) ev.res.value -= beta(j);

  ev.subgradient = Vec::Zero(m);
  if (m) {
    // d/d pi_i of sum log lambda_l(DCD) = -sum_j A_ij w_j, w_j = sum_{l<=t} U_jl^2.
    const Vec w = sp.vectors.leftCols(inst.t).rowwise().squaredNorm();
    ev.subgradient = -inst.A * w + inst.b;
    for (int j : ev.res.K) ev.subgradient -= inst.A.col(j);
  }
  return ev;
}

}  // namespace

SpectralBoundResult lagrangian_spectral_value(const Instance& inst, const Vec& pi) {
  return evaluate(inst, pi).res;
}

SpectralBoundResult lagrangian_spectral_bound(const Instance& inst, const Vec& pi0, int iters) {
  const int m = inst.m();
  if (m == 0) {
    SpectralBoundResult r;
    r.value = spectral_bound(inst.C, inst.t);
    r.pi = Vec(0);
    return r;
  }
  Vec pi = pi0.size() == m ? pi0.cwiseMax(0.0) : Vec(Vec::Zero(m));
  Evaluation ev = evaluate(inst, pi);
  SpectralBoundResult best = ev.res;
  const double step0 = 1.0 / (1.0 + inst.b.cwiseAbs().maxCoeff());
  for (int k = 1; k <= iters; ++k) {
    const double gnorm = ev.subgradient.norm();
    if (gnorm == 0.0) break;
    pi = (pi - (step0 / std::sqrt(static_cast<double>(k))) * ev.subgradient / gnorm).cwiseMax(0.0);
    ev = evaluate(inst, pi);
    if (ev.res.value < best.value) best = ev.res;
    best.iterations = k;
  }
  return best;
}

}  // namespace gmesp
