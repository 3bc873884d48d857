#include "zonal/solver.hpp"

#include <algorithm>
#include <cmath>

#include "zonal/constants.hpp"
#include "zonal/error.hpp"

namespace zonal {

const char* to_string(Uniqueness u) {
  return u == Uniqueness::unique_up_to_translation ? "unique-up-to-vertical-translation" : "non-unique-patchable";
}

bool SolveReport::passed() const {
  return support.pass && not_equatorial.pass && transformed.pass && endpoints.pass && equator_inequality.pass;
}

std::string SolveReport::failed_clause() const {
  if (!support.pass) return "i";
  if (!not_equatorial.pass) return "ii";
  if (!endpoints.pass) return "iv";
  if (!transformed.pass) return "iii";
  if (!equator_inequality.pass) return "v";
  return {};
}

namespace {

double total_mass(const ZonalMeasure& mu) {
  return integrate([](double) { return 1.0; }, mu);
}

double sampled_scale(const ZonalMeasure& mu) {
  double scale = 0.0;
  for (const auto& a : mu.atoms()) scale = std::max(scale, std::abs(a.mass));
  for (const auto& p : mu.pieces()) {
    for (int k = 0; k < 32; ++k) {
      const double x = 0.5 * (p.lo + p.hi) - 0.5 * (p.hi - p.lo) * std::cos(M_PI * (k + 0.5) / 32);
      scale = std::max(scale, std::abs(p.f(x)));
    }
  }
  return std::max(scale, 1e-300);
}

}  // namespace

SolveReport check_conditions(const ZonalMeasure& mu, const ReferenceFamily& family, int n, int i,
                             SolveOptions options) {
  if (i < 1 || i > n - 1 || family.size() != n - 1 - i || (family.size() > 0 && family.dimension() != n)) {
    throw Error(ErrorKind::dimension_mismatch, "reference family must hold n-1-i bodies of dimension n");
  }
  if (mu.min_sample() < -options.nonnegative * sampled_scale(mu)) {
    throw Error(ErrorKind::not_nonnegative, "measure has a negative part");
  }
  const double total = total_mass(mu);
  const double first = moment(mu, MomentKind::first);
  if (std::abs(first) > options.centering * std::max(std::abs(total), 1e-300)) {
    throw Error(ErrorKind::not_centered, "first moment " + std::to_string(first));
  }

  SolveReport rep;
  const auto I = positivity_interval(family.profile);
  rep.a_minus = I.lo;
  rep.a_plus = I.hi;
  rep.uniqueness = (I.lo == -1.0 && I.hi == 1.0) ? Uniqueness::unique_up_to_translation
                                                 : Uniqueness::non_unique_patchable;
  const double scale = std::max(std::abs(total), 1e-300);

  // (i)
  double outside = 0.0;
  if (I.hi < 1.0) outside += std::abs(cap_mass(mu.restricted(Interval{I.hi, 1.0, false, true}), I.hi, Pole::plus));
  if (I.lo > -1.0) outside += std::abs(cap_mass(mu.restricted(Interval{-1.0, I.lo, true, false}), -I.lo, Pole::minus));
  rep.support = {outside <= 1e-10 * scale, -outside, "mass outside [a-, a+]: " + std::to_string(outside)};

  // (ii)
  const double off_equator = total - mu.atom_at(0.0);
  rep.not_equatorial = {off_equator > 1e-10 * scale, off_equator, "mass off the equator: " + std::to_string(off_equator)};
  if (!rep.support.pass || !rep.not_equatorial.pass) return rep;

  // (iii), (iv) through the preimage
  const double c = family.correction();
  const auto pre = adjoint_preimage(family.profile, mu, c, {.require_nonnegative = false, .throw_if_infeasible = false});
  rep.sigma = pre.sigma;
  rep.endpoints = {pre.end_lo.verdict == Verdict::member && pre.end_hi.verdict == Verdict::member, 0.0,
                   std::string("limit at a-: ") + to_string(pre.end_lo.verdict) + ", at a+: " + to_string(pre.end_hi.verdict)};
  if (!rep.endpoints.pass) rep.endpoints.margin = -1.0;

  if (!pre.interior_finite) {
    rep.transformed = {false, -1.0, "preimage is not a finite measure"};
  } else {
    const ZonalMeasure off_zero = pre.sigma.with_atom(0.0, -pre.sigma.atom_at(0.0));
    const double lowest = off_zero.min_sample();
    const double floor = -options.nonnegative * sampled_scale(pre.sigma);
    rep.transformed = {lowest >= floor, lowest, "smallest sampled value " + std::to_string(lowest)};
  }

  // (v)
  const double r0 = family.profile.base();
  const double upper_moment = integrate([](double t) { return std::max(t, 0.0); }, mu);
  const double lhs = r0 * mu.atom_at(0.0) - 2.0 * c * upper_moment;
  rep.equator_inequality = {lhs >= -1e-10 * scale, lhs, "equator margin " + std::to_string(lhs)};
  return rep;
}

namespace {

ZonalMeasure interior_part(const ZonalMeasure& sigma, double k) {
  return sigma.restricted(Interval::open(-1.0, 1.0))
      .with_atom(0.0, -sigma.atom_at(0.0))
      .with_carrier(-1.0, 1.0)
      .scaled(1.0 / k);
}

}  // namespace

PoleValues pole_values(const ZonalMeasure& sigma, int n) {
  const double k = kappa(n - 1);
  TailIntegral moment(interior_part(sigma, k), [](double s) { return s; });
  return {sigma.atom_at(1.0) / k + moment.upper(0.0, false), sigma.atom_at(-1.0) / k - moment.lower(0.0, false)};
}

BodyOfRevolution solve_disk(const ZonalMeasure& sigma, int n, int i, SolveOptions options) {
  if (i < 1 || i > n - 1) throw Error(ErrorKind::dimension_mismatch, "degree out of range");
  const double k = kappa(n - 1);
  const double total = total_mass(sigma);
  if (sigma.min_sample() < -options.nonnegative * sampled_scale(sigma)) {
    throw Error(ErrorKind::not_nonnegative, "measure has a negative part");
  }
  const double off_equator = total - sigma.atom_at(0.0);
  if (!(off_equator > 1e-10 * std::max(total, 1e-300))) {
    throw Error(ErrorKind::infeasible, "measure is concentrated on the equator");
  }

  const ZonalMeasure nu = interior_part(sigma, k);
  const double north = sigma.atom_at(1.0) / k, south = sigma.atom_at(-1.0) / k;
  const auto [a_north, a_south] = pole_values(sigma, n);
  if (std::abs(a_north - a_south) > options.pole_consistency * std::max(1.0, std::abs(a_north))) {
    throw Error(ErrorKind::not_centered, "pole values disagree: " + std::to_string(a_north) + " vs " +
                                             std::to_string(a_south));
  }
  const double A = 0.5 * (a_north + a_south);
  if (A < 0.0) throw Error(ErrorKind::infeasible, "waist power is negative");

  BV0Function P(A, nu, south, north);
  const BV0Function R = root(P, i);
  const double waist = R.base();
  double segment = 0.0;
  const double equator = sigma.atom_at(0.0);
  if (equator > 0.0) {
    const double w = i == 1 ? 1.0 : std::pow(waist, i - 1);
    if (!(w > 1e-13)) throw Error(ErrorKind::equator_mass_with_zero_waist, "equator mass needs a positive waist");
    segment = equator / (i * k * w);
  }
  return make_body(n, R, segment, 0.0, "solution");
}

SolveReport solve(const ZonalMeasure& mu, const ReferenceFamily& family, int n, int i, SolveOptions options) {
  SolveReport rep = check_conditions(mu, family, n, i, options);
  if (!rep.passed()) return rep;
  rep.body = solve_disk(rep.sigma, n, i, options);
  const auto& nu = rep.body->profile.nu();
  rep.degenerate = nu.atoms().empty() && (nu.pieces().empty() || nu.total_variation() <= 1e-12);
  rep.residual = residual(mu, mixed_area_pushforward(*rep.body, i, family));
  return rep;
}

std::vector<Fn> residual_family() {
  std::vector<Fn> out;
  for (int j = 0; j <= 16; ++j) out.push_back([j](double t) { return std::cos(j * std::acos(std::clamp(t, -1.0, 1.0))); });
  for (int k = -3; k <= 3; ++k) {
    const double c = 0.25 * k;
    out.push_back([c](double t) { return 0.5 * (1.0 + std::tanh((t - c) / 0.05)); });
  }
  return out;
}

double residual(const ZonalMeasure& a, const ZonalMeasure& b) {
  const double scale = std::max(1.0, std::abs(total_mass(a)));
  double worst = 0.0;
  for (const auto& f : residual_family()) worst = std::max(worst, std::abs(integrate(f, a) - integrate(f, b)));
  return worst / scale;
}

}  // namespace zonal
