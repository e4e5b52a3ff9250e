#ifndef GMESP_SPECTRAL_HPP
#define GMESP_SPECTRAL_HPP

#include <vector>

#include "gmesp/instance.hpp"

namespace gmesp {

struct SpectralBoundResult {
  double value = 0.0;
  Vec pi;
  std::vector<int> K;
  int iterations = 0;
};

double spectral_bound(const Mat& C, int t);

// v(pi) for a single multiplier vector.
SpectralBoundResult lagrangian_spectral_value(const Instance& inst, const Vec& pi);

SpectralBoundResult lagrangian_spectral_bound(const Instance& inst, const Vec& pi0 = Vec(), int iters = 200);

}  // namespace gmesp

#endif  // GMESP_SPECTRAL_HPP
