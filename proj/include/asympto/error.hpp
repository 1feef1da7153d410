#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace asympto {

enum class ErrorKind {
  WindowExceeded,
  NotLogConvex,
  TailTruncationDominant,
  PreconditionFailed,
  Inconsistent,
  OutsideSector,
  QuadratureNotConverged,
  EmptySeries,
  MomentsMissing,
  NotShiftedEquivalent,
  IllConditioned,
  OutsideAperture,
  GrowthCapExceeded,
  MittagLefflerDomainExceeded,
  PathOutsideSector,
  NotSmallO,
  ConstructionFailed,
  InputTrendViolated,
  ReportedPartial,
  ConfigInvalid,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace asympto
