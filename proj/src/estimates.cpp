#include "zonal/estimates.hpp"

#include <algorithm>
#include <cmath>

#include "zonal/constants.hpp"
#include "zonal/error.hpp"

namespace zonal {

CapPoint firey_bound(const BodyOfRevolution& K, const ReferenceFamily& family, int i, double t, Pole pole) {
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorKind::invalid_argument, "cap parameter must lie in (0, 1]");
  if (i < 1 || i > K.n - 1 || family.size() != K.n - 1 - i) {
    throw Error(ErrorKind::dimension_mismatch, "reference family must hold n-1-i bodies");
  }
  const ZonalMeasure mu = mixed_area_pushforward(K, i, family);
  const double x = pole == Pole::plus ? t : -t;
  const Side inner = pole == Pole::plus ? Side::left : Side::right;
  const double r = x == 1.0 || x == -1.0 ? (pole == Pole::plus ? family.profile.limit_hi() : family.profile.limit_lo())
                                         : family.profile(x, inner);
  return {cap_mass(mu, t, pole), kappa(K.n - 1) * std::pow(K.waist(), i) * r / t};
}

CapCurve cap_curve(const BodyOfRevolution& K, const ReferenceFamily& family, int i, Pole pole,
                   const std::vector<double>& grid) {
  CapCurve c;
  const ZonalMeasure mu = mixed_area_pushforward(K, i, family);
  const double scale = kappa(K.n - 1) * std::pow(K.waist(), i);
  for (double t : grid) {
    const double x = pole == Pole::plus ? t : -t;
    const double r = family.profile(x, pole == Pole::plus ? Side::left : Side::right);
    const double m = cap_mass(mu, t, pole), b = scale * r / t;
    c.t.push_back(t);
    c.measured.push_back(m);
    c.bound.push_back(b);
    c.ratio.push_back(b > 0.0 ? m / b : 0.0);
  }
  return c;
}

Extrapolation richardson(const std::vector<double>& values) {
  Extrapolation out;
  out.sequence = values;
  const std::size_t n = values.size();
  if (n == 0) return out;
  out.value = values.back();
  if (n < 4) return out;

  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double flat = 1e-12 * std::max(scale, 1e-300);
  int sign = 0;
  bool monotone = true;
  for (std::size_t k = n - 3; k < n; ++k) {
    const double d = values[k] - values[k - 1];
    if (std::abs(d) <= flat) continue;
    const int s = d > 0 ? 1 : -1;
    if (sign != 0 && s != sign) monotone = false;
    sign = s;
  }

  // Each factor is applied twice, which removes h^p log h along with h^p.
  std::vector<std::vector<double>> table(n);
  for (std::size_t m = 0; m < n; ++m) {
    table[m].push_back(values[m]);
    for (std::size_t j = 1; j <= m; ++j) {
      const double f = std::pow(std::sqrt(2.0), static_cast<double>((j + 1) / 2));
      table[m].push_back((f * table[m][j - 1] - table[m - 1][j - 1]) / (f - 1.0));
    }
  }
  // Column whose last two entries agree best.
  double best = std::abs(values[n - 1] - values[n - 2]);
  out.value = values[n - 1];
  for (std::size_t j = 1; j < table[n - 1].size() && j < table[n - 2].size(); ++j) {
    const double gap = std::abs(table[n - 1][j] - table[n - 2][j]);
    if (gap < best) {
      best = gap;
      out.value = table[n - 1][j];
    }
  }
  out.converged = monotone;
  return out;
}

DensityLimit density_limit(const BodyOfRevolution& K, int i, Pole pole, int levels) {
  if (K.is_segment) throw Error(ErrorKind::invalid_argument, "density limit needs a body that is not a segment");
  const int n = K.n, k = n - 1 - i;
  const ZonalMeasure mu = mixed_area_pushforward(K, i, repeated(catalog::ball(n), k));
  std::vector<double> values;
  for (int m = 4; m < 4 + levels; ++m) {
    const double h = std::ldexp(1.0, -m);
    const double t = 1.0 - h;
    values.push_back(cap_mass(mu, t, pole) / (kappa(k) * std::pow(h * (2.0 - h), 0.5 * k)));
  }
  DensityLimit out;
  out.estimate = richardson(values);
  out.predicted = std::pow(K.pole_radius(pole), i) * kappa(n - 1) / kappa(k);
  return out;
}

ValuationValue valuation_pv(const IntervalFunction& f, const BodyOfRevolution& K, const ReferenceFamily& family, int i,
                            int levels) {
  const int n = K.n;
  if (family.size() != n - 1 - i) throw Error(ErrorKind::dimension_mismatch, "reference family must hold n-1-i bodies");
  if (d_membership(family.profile, f).verdict == Verdict::nonmember) {
    throw Error(ErrorKind::not_in_domain, "f is not in the domain of the transform");
  }
  ValuationValue out;
  const IntervalFunction g = t_hat_apply(family, f);
  out.disk = integrate([&g](double t) { return g(t); }, disk_mixed_pushforward(K, i));

  const ZonalMeasure mu = mixed_area_pushforward(K, i, family);
  const auto I = positivity_interval(family.profile);
  // An end is cut out only where R_C vanishes; elsewhere f extends to the end.
  const double r_lo = I.lo == -1.0 ? family.profile.limit_lo() : family.profile(I.lo, Side::right);
  const double r_hi = I.hi == 1.0 ? family.profile.limit_hi() : family.profile(I.hi, Side::left);
  const bool cut_lo = r_lo <= 1e-13, cut_hi = r_hi <= 1e-13;
  auto value = [&f](double t) { return f(t); };
  if (!cut_lo && !cut_hi) {
    out.pv.value = mu.integrate(value, Interval{I.lo, I.hi, true, true});
    out.pv.converged = true;
    out.pv.sequence = {out.pv.value};
    return out;
  }
  std::vector<double> values;
  for (int m = 6; m < 6 + levels; ++m) {
    const double eps = std::ldexp(1.0, -m);
    const double w = 0.5 * (I.hi - I.lo) * eps;
    const double lo = cut_lo ? I.lo + w : I.lo;
    const double hi = cut_hi ? I.hi - w : I.hi;
    values.push_back(mu.integrate(value, Interval{lo, hi, true, true}));
  }
  out.pv = richardson(values);
  return out;
}

double cone_valuation(const Fn& g, double s, int n) {
  if (s == 0.0 || std::abs(s) > 1.0) throw Error(ErrorKind::invalid_argument, "cone parameter must lie in [-1, 1] without 0");
  return kappa(n - 1) * (g(s > 0.0 ? -1.0 : 1.0) + g(s) / std::abs(s));
}

}  // namespace zonal
