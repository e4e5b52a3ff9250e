#include "gmesp/report.hpp"

#include "gmesp/error.hpp"

namespace gmesp {

const char* to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Spectral: return "spectral";
    case BoundKind::LagrangianSpectral: return "lagrangian-spectral";
    case BoundKind::DDGFact: return "ddgfact";
    case BoundKind::Glinx: return "glinx";
    case BoundKind::GnlpId: return "gnlp-id";
    case BoundKind::GnlpComp: return "gnlp-comp";
  }
  return "unknown";
}

BoundKind parse_bound_kind(const std::string& name) {
  for (BoundKind k : {BoundKind::Spectral, BoundKind::LagrangianSpectral, BoundKind::DDGFact, BoundKind::Glinx,
                      BoundKind::GnlpId, BoundKind::GnlpComp}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::Parse, "unknown bound kind '" + name + "'");
}

}  // namespace gmesp
