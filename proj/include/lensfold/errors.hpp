#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace lensfold {

enum class Errc {
  DegenerateCurve,
  OutOfDomain,
  FrameUndefined,
  InvalidSurfaceNormal,
  InvalidProfile,
  InvalidPattern,
  InfeasiblePattern,
  TrapezoidInfeasible,
  FoldDepthInfeasible,
  SingularHeight,
  QuadratureFailure,
  TilingInconsistent,
  MVInconsistent,
  MVRuleViolation,
  TangentRuling,
  InvalidConfig,
};

const char* to_string(Errc code) noexcept;

/// Every failure raised by the library. `where()` carries the offending
/// parameter (profile t, arclength s, ...) when one exists.
class LensError : public std::runtime_error {
 public:
  LensError(Errc code, const std::string& message, std::optional<double> where = std::nullopt);

  Errc code() const noexcept { return code_; }
  std::optional<double> where() const noexcept { return where_; }

 private:
  Errc code_;
  std::optional<double> where_;
};

}  // namespace lensfold
