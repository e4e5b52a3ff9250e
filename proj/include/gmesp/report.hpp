#ifndef GMESP_REPORT_HPP
#define GMESP_REPORT_HPP

#include <limits>
#include <string>
#include <vector>

#include "gmesp/linalg.hpp"

namespace gmesp {

enum class BoundKind { Spectral, LagrangianSpectral, DDGFact, Glinx, GnlpId, GnlpComp };

const char* to_string(BoundKind kind);
BoundKind parse_bound_kind(const std::string& name);

struct BoundReport {
  BoundKind kind = BoundKind::Spectral;
  std::string region = "n/a";
  std::string scaling = "none";
  double gamma = 1.0;
  Vec upsilon;
  double primal = std::numeric_limits<double>::quiet_NaN();
  double certified = std::numeric_limits<double>::quiet_NaN();
  bool certificate_ok = false;
  double max_residual = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  std::string status = "ok";
  std::vector<std::string> diagnostics;
};

}  // namespace gmesp

#endif  // GMESP_REPORT_HPP
