#include "lensfold/errors.hpp"

namespace lensfold {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DegenerateCurve: return "DegenerateCurve";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::FrameUndefined: return "FrameUndefined";
    case Errc::InvalidSurfaceNormal: return "InvalidSurfaceNormal";
    case Errc::InvalidProfile: return "InvalidProfile";
    case Errc::InvalidPattern: return "InvalidPattern";
    case Errc::InfeasiblePattern: return "InfeasiblePattern";
    case Errc::TrapezoidInfeasible: return "TrapezoidInfeasible";
    case Errc::FoldDepthInfeasible: return "FoldDepthInfeasible";
    case Errc::SingularHeight: return "SingularHeight";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::TilingInconsistent: return "TilingInconsistent";
    case Errc::MVInconsistent: return "MVInconsistent";
    case Errc::MVRuleViolation: return "MVRuleViolation";
    case Errc::TangentRuling: return "TangentRuling";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

LensError::LensError(Errc code, const std::string& message, std::optional<double> where)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), where_(where) {}

}  // namespace lensfold
