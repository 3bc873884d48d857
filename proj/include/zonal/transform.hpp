#pragma once

#include <optional>
#include <string>

#include "zonal/body.hpp"
#include "zonal/bv0.hpp"
#include "zonal/measure.hpp"

namespace zonal {

// Function on a carrier [lo, hi], optionally extended by lines through the
// origin beyond it (the form every image of the transform takes outside the
// positivity interval).
struct IntervalFunction {
  double lo = -1.0, hi = 1.0;
  Fn map;
  std::optional<double> limit_lo, limit_hi;
  std::optional<double> slope_lo, slope_hi;

  double operator()(double t) const;
  static IntervalFunction on(Fn f, double lo = -1.0, double hi = 1.0);
  // Same function continued by t * f(end) / end past each end that is not +-1.
  IntervalFunction extended() const;
};

enum class Verdict { member, nonmember, undecided };
const char* to_string(Verdict v);

struct LimitEstimate {
  Verdict verdict = Verdict::undecided;
  double value = 0.0;
};

// Limit of g(t) as t -> end from the side of inside, sampled on
// t_m = end - 2^-m (end - inside), m <= 40. Converged when successive values (or
// their Aitken extrapolants) agree to 1e-6, divergent when the differences stop
// contracting or the values blow up.
LimitEstimate probe_limit(const std::function<double(double)>& g, double end, double inside, int levels = 40);

IntervalFunction t_apply(const BV0Function& R, const IntervalFunction& f);
IntervalFunction t_hat_apply(const ReferenceFamily& family, const IntervalFunction& f);

// True when g is linear (through the origin) outside [lo, hi], to tol relative to sup |g|.
bool support_check(const IntervalFunction& g, double lo, double hi, double tol = 1e-10);

// Inverse on the positivity interval of R. Throws NotInImage unless g is linear outside it.
IntervalFunction t_inverse(const BV0Function& R, const IntervalFunction& g, double tol = 1e-8);
IntervalFunction t_hat_inverse(const ReferenceFamily& family, const IntervalFunction& g, double tol = 1e-8);

struct Membership {
  Verdict verdict = Verdict::undecided;
  LimitEstimate product_lo, product_hi;    // R(t) f(t) toward a- and a+
  LimitEstimate integral_lo, integral_hi;  // int over [t, 0) and (0, t] of f d nu
};
Membership d_membership(const BV0Function& R, const IntervalFunction& f);

ZonalMeasure adjoint_apply(const BV0Function& R, const ZonalMeasure& sigma);
ZonalMeasure t_hat_adjoint(const ReferenceFamily& family, const ZonalMeasure& sigma);

struct PreimageOptions {
  bool require_nonnegative = false;
  bool throw_if_infeasible = true;
  double vanishing = 1e-13;  // limits of R at or below this count as zero
};

struct PreimageReport {
  ZonalMeasure sigma;
  double a_minus = -1.0, a_plus = 1.0;
  bool interior_finite = true;
  LimitEstimate end_lo, end_hi;
  double min_value = 0.0;
  bool nonnegative = true;
  std::string failure;  // empty when feasible

  bool feasible() const { return failure.empty(); }
};

// Measure sigma0 with adjoint (corrected by c * int |s| d sigma at 0) equal to mu.
PreimageReport adjoint_preimage(const BV0Function& R, const ZonalMeasure& mu, double c = 0.0,
                                PreimageOptions options = {});

// Zonal mixed spherical projection of f at height s for a family of n - k
// bodies without vertical segments.
double sph_projection(const ReferenceFamily& family, const IntervalFunction& f, double s, int n, int k);

}  // namespace zonal
