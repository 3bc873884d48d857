#pragma once

#include <stdexcept>
#include <string>

namespace zonal {

enum class ErrorKind {
  non_integrable,
  out_of_carrier,
  vanishing_divisor,
  singular_at_zero,
  not_convex,
  segment_not_allowed,
  dimension_mismatch,
  not_in_image,
  infeasible,
  not_centered,
  not_nonnegative,
  equator_mass_with_zero_waist,
  segment_in_boundary,
  not_in_domain,
  not_smooth,
  invalid_argument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace zonal
