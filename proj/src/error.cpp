#include "ems/error.hpp"

namespace ems {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::ZeroColumn: return "ZeroColumn";
    case Errc::ZeroSignal: return "ZeroSignal";
    case Errc::ZeroTrainingColumn: return "ZeroTrainingColumn";
    case Errc::TooLarge: return "TooLarge";
    case Errc::InvalidSize: return "InvalidSize";
    case Errc::InvalidShape: return "InvalidShape";
    case Errc::InvalidSparsity: return "InvalidSparsity";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotSquare: return "NotSquare";
    case Errc::NotOrthonormal: return "NotOrthonormal";
    case Errc::NotDivisible: return "NotDivisible";
    case Errc::NearSingularCoordinate: return "NearSingularCoordinate";
    case Errc::SingularSubproblem: return "SingularSubproblem";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::SvdFailure: return "SvdFailure";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::BadHeader: return "BadHeader";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace ems
