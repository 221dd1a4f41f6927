#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ems {

enum class Errc {
  ZeroVector,
  ZeroColumn,
  ZeroSignal,
  ZeroTrainingColumn,
  TooLarge,
  InvalidSize,
  InvalidShape,
  InvalidSparsity,
  InvalidArgument,
  DimensionMismatch,
  NotSquare,
  NotOrthonormal,
  NotDivisible,
  NearSingularCoordinate,
  SingularSubproblem,
  RankDeficient,
  SvdFailure,
  IoError,
  ParseError,
  UnsupportedFormat,
  BadHeader,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above; what()
/// is prefixed with the code name so command-line users see it verbatim.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ems
