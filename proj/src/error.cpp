#include "asympto/error.hpp"

namespace asympto {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::WindowExceeded: return "WindowExceeded";
    case ErrorKind::NotLogConvex: return "NotLogConvex";
    case ErrorKind::TailTruncationDominant: return "TailTruncationDominant";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::OutsideSector: return "OutsideSector";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::MomentsMissing: return "MomentsMissing";
    case ErrorKind::NotShiftedEquivalent: return "NotShiftedEquivalent";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::OutsideAperture: return "OutsideAperture";
    case ErrorKind::GrowthCapExceeded: return "GrowthCapExceeded";
    case ErrorKind::MittagLefflerDomainExceeded: return "MittagLefflerDomainExceeded";
    case ErrorKind::PathOutsideSector: return "PathOutsideSector";
    case ErrorKind::NotSmallO: return "NotSmallO";
    case ErrorKind::ConstructionFailed: return "ConstructionFailed";
    case ErrorKind::InputTrendViolated: return "InputTrendViolated";
    case ErrorKind::ReportedPartial: return "ReportedPartial";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace asympto
