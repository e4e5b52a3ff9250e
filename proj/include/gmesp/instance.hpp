#ifndef GMESP_INSTANCE_HPP
#define GMESP_INSTANCE_HPP

#include <string>
#include <vector>

#include "gmesp/linalg.hpp"

namespace gmesp {

struct Instance {
  Mat C;
  int s = 0;
  int t = 0;
  Mat A;  // m x n side constraints A x <= b
  Vec b;
  Vec l;  // box lower bounds (binary)
  Vec c;  // box upper bounds (binary)

  int n() const { return static_cast<int>(C.rows()); }
  int m() const { return static_cast<int>(A.rows()); }
};

// Instance with default boxes [0,1]^n and no side constraints.
Instance make_instance(const Mat& C, int s, int t);

// Throws InvariantViolation on bad dimensions, symmetry or boxes; Infeasible when the budget
// cannot meet the boxes.
void validate(const Instance& inst);

struct BinarySolution {
  Vec x;
  double value = 0.0;
  std::vector<int> support() const;
};

// Relaxation point (x, X).
struct RelaxPoint {
  Vec x;
  Mat X;
};

std::vector<int> support_of(const Vec& x);
Vec indicator(int n, const std::vector<int>& S);

// Sum of the t largest log eigenvalues of C[S,S].
double top_t_logdet(const Mat& C, const std::vector<int>& S, int t);

// Binary feasibility: e^T x = s, A x <= b, l <= x <= c.
bool is_feasible_binary(const Instance& inst, const Vec& x, double tol = 1e-9);

BinarySolution brute_force(const Instance& inst, int guard = 25);

RelaxPoint binary_to_projector(const Instance& inst, const Vec& xhat);

Instance kron_lift(const Instance& inst, int k);

// Deletes the variables in F0.
Instance reduce(const Instance& inst, const std::vector<int>& F0);

// C = Q^T Q with Q standard normal n x n.
Mat random_covariance(int n, unsigned seed);

// random_covariance plus m side constraints: A uniform on [0,1], b = A x_ref + 0.05
// for a random s-subset x_ref.
Instance random_instance(int n, int s, int t, int m, unsigned seed);

}  // namespace gmesp

#endif  // GMESP_INSTANCE_HPP
