#pragma once

#include <vector>

#include "zonal/body.hpp"
#include "zonal/transform.hpp"

namespace zonal {

struct CapPoint {
  double measured = 0.0;
  double bound = 0.0;
};

// Mass of the closed polar cap {+-s >= t} under S(K[i], C) and the sharp
// bound kappa_{n-1} R_K(0)^i R_C(+-t) / t, with R_C taken on the side of 0.
CapPoint firey_bound(const BodyOfRevolution& K, const ReferenceFamily& family, int i, double t, Pole pole);

struct CapCurve {
  std::vector<double> t, measured, bound, ratio;
};
CapCurve cap_curve(const BodyOfRevolution& K, const ReferenceFamily& family, int i, Pole pole,
                   const std::vector<double>& grid);

struct Extrapolation {
  double value = 0.0;
  bool converged = false;
  std::vector<double> sequence;
};

// Limit of a sequence sampled at h_m = 2^-m, assuming an expansion in powers of
// sqrt(h), each possibly multiplied by log h. Not converged when the last four
// samples are not monotone.
Extrapolation richardson(const std::vector<double>& values);

struct DensityLimit {
  Extrapolation estimate;
  double predicted = 0.0;
};

// Limit of cap mass / (kappa_{n-i-1} (1-t^2)^{(n-i-1)/2}) for S_i(K) as t -> 1 at
// the pole, against rho^i kappa_{n-1} / kappa_{n-1-i}.
DensityLimit density_limit(const BodyOfRevolution& K, int i, Pole pole, int levels = 12);

struct ValuationValue {
  Extrapolation pv;
  double disk = 0.0;
};

// Principal-value integral of f against S(K[i], C), truncated near the ends of
// the positivity interval where R_C vanishes, and the same valuation through the
// disk, int T_C f dS(K[i], D).
ValuationValue valuation_pv(const IntervalFunction& f, const BodyOfRevolution& K, const ReferenceFamily& family, int i,
                            int levels = 12);

// kappa_{n-1} (g(-sign s) + g(s) / |s|): the disk valuation at catalog::cone(n, s).
double cone_valuation(const Fn& g, double s, int n);

}  // namespace zonal
