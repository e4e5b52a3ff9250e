#ifndef GMESP_ERROR_HPP
#define GMESP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gmesp {

enum class ErrorCode {
  Parse,
  Infeasible,
  NearSingular,
  RankDeficient,
  DegenerateSpectrum,
  CertificateFailure,
  MaxIterations,
  TooLarge,
  InvariantViolation,
  NonConvergence,
  Internal
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

const char* to_string(ErrorCode code);

}  // namespace gmesp

#endif  // GMESP_ERROR_HPP
