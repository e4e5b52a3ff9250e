#include "gmesp/error.hpp"

namespace gmesp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::CertificateFailure: return "CertificateFailure";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace gmesp
