#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wedgeframe {

enum class ErrorCode {
  Orientation,
  DivergentTail,
  Exponents,
  TailRange,
  NoKernel,
  K1Range,
  CertFail,
  NoDeficitBox,
  ParamInfeasible,
  GridRange,
  UnresolvedGrid,
  Envelope,
  Coverage,
  EntryEval,
  Config,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Library error carrying a machine-readable code. The message is prefixed
/// with the code name so CLI output stays greppable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wedgeframe
