#ifndef GMESP_SRC_BARRIER_HPP
#define GMESP_SRC_BARRIER_HPP

#include <vector>

#include "matrix_model.hpp"

namespace gmesp::detail {

// Log-barrier formulation of max f(X) over a relaxation region. The variable vector
// stacks the upper triangle of X restricted to the support J and the free x entries;
// when t = s forces X = Diag(x) only the free x entries remain.
class Barrier {
 public:
  Barrier(const Instance& inst, const Model& md, const RegionSpec& region);

  int dim() const { return forced_ ? nF_ : mX_ + nF_; }
  bool forced_diagonal() const { return forced_; }
  const std::vector<int>& support() const { return J_; }

  Vec initial_point() const;
  const Mat& equality_matrix() const { return Aeq_; }

  // Barrier objective -f - mu * (sum of log barriers); false when v is outside the domain.
  bool value(const Vec& v, double mu, double& phi) const;
  bool derivatives(const Vec& v, double mu, double& phi, Vec& g, Mat& H) const;

  Vec x_of(const Vec& v) const;
  Mat X_of(const Vec& v) const;
  BarrierMultipliers multipliers(const Vec& v, double mu) const;

 private:
  bool evaluate(const Vec& v, double mu, int order, double& phi, Vec* g, Mat* H) const;
  Mat XJ_of(const Vec& v) const;

  const Instance& inst_;
  const Model& md_;
  RegionSpec region_;
  bool forced_ = false;
  std::vector<int> J_;
  std::vector<int> free_;
  std::vector<int> local_;  // global index -> position in J or -1
  std::vector<std::pair<int, int>> pairs_;
  Eigen::MatrixXi pidx_;
  Vec xfix_;
  std::vector<Mat> MJ_;
  Mat linJ_;
  Mat Aeq_;
  double budget_ = 0.0;
  int mX_ = 0;
  int nF_ = 0;
};

struct PathResult {
  Vec v;
  double mu = 0.0;
  int newton_steps = 0;
  bool converged = true;
};

PathResult follow_path(const Barrier& barrier, const SolverOptions& opts);

}  // namespace gmesp::detail

#endif  // GMESP_SRC_BARRIER_HPP
