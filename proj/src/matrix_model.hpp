#ifndef GMESP_SRC_MATRIX_MODEL_HPP
#define GMESP_SRC_MATRIX_MODEL_HPP

#include <vector>

#include "gmesp/matrix_bounds.hpp"

namespace gmesp::detail {

// f(X) = alpha * ldet(I_p + sum_k a_k M_k X M_k^T) + <lin, X> + offset.
struct Model {
  double alpha = 0.5;
  std::vector<double> a;
  std::vector<Mat> M;
  Mat lin;
  double offset = 0.0;
  int p = 0;
};

Model make_model(const Mat& C, double t, MatrixKind kind, const ScalingState& scaling);
Mat model_K(const Model& md, const Mat& X);
// False when the ldet argument is not positive definite.
bool model_value(const Model& md, const Mat& X, double& value);
// Sum_k a_k M_k^T Theta M_k + lin.
Mat model_gradient(const Model& md, const Mat& Theta);
// -alpha ldet(Theta/alpha) - alpha p + tr Theta + offset.
double model_conjugate(const Model& md, const Mat& Theta);

}  // namespace gmesp::detail

#endif  // GMESP_SRC_MATRIX_MODEL_HPP
