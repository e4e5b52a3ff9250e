#include "matrix_model.hpp"

#include <cmath>

namespace gmesp::detail {

Model make_model(const Mat& C, double t, MatrixKind kind, const ScalingState& scaling) {
  const Eigen::Index n = C.rows();
  Model md;
  switch (kind) {
    case MatrixKind::Glinx: {
      md.alpha = 0.5;
      md.p = static_cast<int>(n);
      md.a = {1.0, -1.0};
      if (scaling.gscaled()) {
        if ((scaling.upsilon.array() <= 0.0).any())
          throw Error(ErrorCode::InvariantViolation, "upsilon must be positive");
        const auto D = scaling.upsilon.asDiagonal();
        md.M = {Mat(D * C * D), Mat::Identity(n, n)};
        md.lin = Mat(-2.0 * scaling.upsilon.array().log().matrix().asDiagonal());
      } else {
        if (!(scaling.gamma > 0.0)) throw Error(ErrorCode::InvariantViolation, "gamma must be positive");
        md.M = {Mat(std::sqrt(scaling.gamma) * C), Mat::Identity(n, n)};
        md.offset = -0.5 * t * std::log(scaling.gamma);
      }
      break;
    }
    case MatrixKind::GnlpId: {
      const FactorSet fs = factorize(C);
      md.alpha = 1.0;
      md.p = fs.p;
      md.a = {-1.0};
      md.M = {Mat(fs.H.transpose())};
      md.offset = t * std::log(fs.lambda_max);
      break;
    }
    case MatrixKind::GnlpComp: {
      const FactorSet fs = factorize(C);
      if (!fs.has_G) throw Error(ErrorCode::NearSingular, "gnlp-comp requires a positive-definite C");
      md.alpha = 1.0;
      md.p = fs.q;
      md.a = {1.0};
      md.M = {Mat(fs.G.transpose())};
      md.offset = t * std::log(fs.lambda_min);
      break;
    }
  }
  return md;
}

Mat model_K(const Model& md, const Mat& X) {
  Mat K = Mat::Identity(md.p, md.p);
  for (std::size_t k = 0; k < md.M.size(); ++k) K += md.a[k] * md.M[k] * X * md.M[k].transpose();
  return (K + K.transpose()) / 2.0;
}

bool model_value(const Model& md, const Mat& X, double& value) {
  double ld = 0.0;
  if (md.p > 0 && !ldet_chol(model_K(md, X), ld)) return false;
  value = md.alpha * ld + md.offset;
  if (md.lin.size()) value += md.lin.cwiseProduct(X).sum();
  return true;
}

Mat model_gradient(const Model& md, const Mat& Theta) {
  const Eigen::Index n = md.M.empty() ? md.lin.rows() : md.M[0].cols();
  Mat G = Mat::Zero(n, n);
  if (md.p > 0)
    for (std::size_t k = 0; k < md.M.size(); ++k) G += md.a[k] * md.M[k].transpose() * Theta * md.M[k];
  if (md.lin.size()) G += md.lin;
  return (G + G.transpose()) / 2.0;
}

double model_conjugate(const Model& md, const Mat& Theta) {
  if (md.p == 0) return md.offset;
  double ld = 0.0;
  if (!ldet_chol(Mat(Theta / md.alpha), ld)) throw Error(ErrorCode::NearSingular, "Theta is not positive definite");
  return -md.alpha * ld - md.alpha * md.p + Theta.trace() + md.offset;
}

}  // namespace gmesp::detail
