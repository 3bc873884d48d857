#include "zonal/error.hpp"

namespace zonal {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::non_integrable: return "NonIntegrable";
    case ErrorKind::out_of_carrier: return "OutOfCarrier";
    case ErrorKind::vanishing_divisor: return "VanishingDivisor";
    case ErrorKind::singular_at_zero: return "SingularAtZero";
    case ErrorKind::not_convex: return "NotConvex";
    case ErrorKind::segment_not_allowed: return "SegmentNotAllowed";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::not_in_image: return "NotInImage";
    case ErrorKind::infeasible: return "Infeasible";
    case ErrorKind::not_centered: return "NotCentered";
    case ErrorKind::not_nonnegative: return "NotNonnegative";
    case ErrorKind::equator_mass_with_zero_waist: return "EquatorMassWithZeroWaist";
    case ErrorKind::segment_in_boundary: return "SegmentInBoundary";
    case ErrorKind::not_in_domain: return "NotInDomain";
    case ErrorKind::not_smooth: return "NotSmooth";
    case ErrorKind::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace zonal
