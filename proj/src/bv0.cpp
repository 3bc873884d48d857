#include "zonal/bv0.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zonal/error.hpp"

namespace zonal {

namespace {

Side resolve(double t, Side side) {
  if (side != Side::cross) return side;
  return t >= 0.0 ? Side::right : Side::left;
}

Side flip(Side side) {
  if (side == Side::left) return Side::right;
  if (side == Side::right) return Side::left;
  return side;
}

// Density pieces over the common refinement of a and b, with the density on each
// cell given by combine(piece of a or null, piece of b or null).
template <class Combine>
std::vector<DensityPiece> merge_pieces(double lo, double hi, const ZonalMeasure& a, const ZonalMeasure& b,
                                       Combine combine) {
  std::vector<DensityPiece> out;
  const auto cut = pieces::cuts(lo, hi, {a.breakpoints(), b.breakpoints()});
  for (std::size_t k = 0; k + 1 < cut.size(); ++k) {
    const double u = cut[k], v = cut[k + 1];
    const DensityPiece* p = pieces::covering(a.pieces(), u, v);
    const DensityPiece* q = pieces::covering(b.pieces(), u, v);
    if (!p && !q) continue;
    out.push_back({u, v, combine(p, q), pieces::worst(pieces::end_kind(p, u), pieces::end_kind(q, u)),
                   pieces::worst(pieces::end_kind(p, v), pieces::end_kind(q, v))});
  }
  return out;
}

// Interior sample points: Chebyshev points of every cell between breakpoints and
// both sides of every atom.
std::vector<std::pair<double, Side>> interior_samples(const BV0Function& R, int per_cell = 16) {
  std::vector<std::pair<double, Side>> out;
  auto cut = pieces::cuts(R.lo(), R.hi(), {R.nu().breakpoints(), {0.0}});
  for (std::size_t k = 0; k + 1 < cut.size(); ++k) {
    const double u = cut[k], v = cut[k + 1];
    for (int j = 0; j < per_cell; ++j) {
      const double x = 0.5 * (u + v) - 0.5 * (v - u) * std::cos(M_PI * (j + 0.5) / per_cell);
      out.push_back({x, Side::right});
    }
  }
  for (const auto& a : R.nu().atoms()) {
    if (a.t <= R.lo() || a.t >= R.hi()) continue;
    out.push_back({a.t, Side::left});
    out.push_back({a.t, Side::right});
  }
  return out;
}

}  // namespace

BV0Function::BV0Function() : BV0Function(constant(1.0)) {}

BV0Function::BV0Function(double base, ZonalMeasure nu, std::optional<double> limit_lo, std::optional<double> limit_hi)
    : base_(base), nu_(std::move(nu)) {
  if (nu_.atom_at(0.0) != 0.0) throw Error(ErrorKind::invalid_argument, "nu must not charge 0");
  if (!(nu_.lo() < 0.0 && nu_.hi() > 0.0)) throw Error(ErrorKind::invalid_argument, "carrier must contain 0 inside");
  moment_ = std::make_shared<TailIntegral>(nu_, [](double s) { return s; });
  limit_hi_ = limit_hi ? *limit_hi : base_ - moment_->upper(0.0, false);
  limit_lo_ = limit_lo ? *limit_lo : base_ + moment_->lower(0.0, false);
}

BV0Function::BV0Function(ZonalMeasure nu, SidedFn exact) : nu_(std::move(nu)), exact_(std::move(exact)) {
  if (nu_.atom_at(0.0) != 0.0) throw Error(ErrorKind::invalid_argument, "nu must not charge 0");
  if (!(nu_.lo() < 0.0 && nu_.hi() > 0.0)) throw Error(ErrorKind::invalid_argument, "carrier must contain 0 inside");
  base_ = exact_(0.0, Side::right);
}

BV0Function BV0Function::constant(double c, double lo, double hi) {
  return BV0Function(ZonalMeasure::zero(lo, hi), [c](double, Side) { return c; });
}

double BV0Function::limit_lo() const { return exact_ ? exact_(lo(), Side::right) : limit_lo_; }
double BV0Function::limit_hi() const { return exact_ ? exact_(hi(), Side::left) : limit_hi_; }

double BV0Function::ftc(double t, Side side) const {
  const double atoms_at_hi = nu_.atom_at(hi()) * hi();
  if (t > 0.0) {
    const bool closed = side == Side::left;
    return limit_hi_ + moment_->upper(t, closed) - atoms_at_hi;
  }
  const double atoms_at_lo = nu_.atom_at(lo()) * lo();
  const bool closed = side == Side::right;
  return limit_lo_ - (moment_->lower(t, closed) - atoms_at_lo);
}

double BV0Function::eval(double t, Side side) const {
  side = resolve(t, side);
  if (t < lo() || t > hi()) {
    throw Error(ErrorKind::out_of_carrier, "evaluation at " + std::to_string(t) + " outside [" + std::to_string(lo()) +
                                               ", " + std::to_string(hi()) + "]");
  }
  if (t == hi()) return limit_hi();
  if (t == lo()) return limit_lo();
  if (t == 0.0) return base_;
  return exact_ ? exact_(t, side) : ftc(t, side);
}

double eval(const BV0Function& R, double t, Side side) { return R.eval(t, side); }

BV0Function BV0Function::scaled(double c) const {
  if (exact_) {
    SidedFn e = exact_;
    return BV0Function(nu_.scaled(c), [e, c](double t, Side s) { return c * e(t, s); });
  }
  return BV0Function(c * base_, nu_.scaled(c), c * limit_lo_, c * limit_hi_);
}

BV0Function BV0Function::restricted(double a, double b) const {
  a = std::max(a, lo());
  b = std::min(b, hi());
  if (a == lo() && b == hi()) return *this;
  ZonalMeasure nu = nu_.restricted(Interval::open(a, b)).with_carrier(a, b);
  if (exact_) {
    SidedFn e = exact_;
    return BV0Function(std::move(nu), [e](double t, Side s) { return e(t, s); });
  }
  return BV0Function(base_, std::move(nu), eval(a, Side::right), eval(b, Side::left));
}

BV0Function product(const BV0Function& R0, const BV0Function& Q0) {
  const double lo = std::max(R0.lo(), Q0.lo()), hi = std::min(R0.hi(), Q0.hi());
  const BV0Function R = R0.restricted(lo, hi), Q = Q0.restricted(lo, hi);
  std::vector<Atom> atoms;
  for (const auto& a : R.nu().atoms()) atoms.push_back({a.t, Q(a.t, Side::left) * a.mass});
  for (const auto& a : Q.nu().atoms()) atoms.push_back({a.t, R(a.t, Side::right) * a.mass});
  auto ps = merge_pieces(lo, hi, R.nu(), Q.nu(), [&](const DensityPiece* p, const DensityPiece* q) -> Fn {
    if (p && q) {
      Fn f = p->f, g = q->f;
      return [R, Q, f, g](double t) { return Q(t) * f(t) + R(t) * g(t); };
    }
    if (p) {
      Fn f = p->f;
      return [Q, f](double t) { return Q(t) * f(t); };
    }
    Fn g = q->f;
    return [R, g](double t) { return R(t) * g(t); };
  });
  ZonalMeasure nu(lo, hi, std::move(atoms), std::move(ps), R.nu().lo_integrable() && Q.nu().lo_integrable(),
                  R.nu().hi_integrable() && Q.nu().hi_integrable());
  if (R.has_closed_form() && Q.has_closed_form()) {
    SidedFn e = R.closed_form(), g = Q.closed_form();
    return BV0Function(std::move(nu), [e, g](double t, Side s) { return e(t, s) * g(t, s); });
  }
  return BV0Function(R.base() * Q.base(), std::move(nu), R.limit_lo() * Q.limit_lo(), R.limit_hi() * Q.limit_hi());
}

BV0Function reciprocal(const BV0Function& R, double floor) {
  for (const auto& [t, side] : interior_samples(R)) {
    if (std::abs(R(t, side)) < floor) {
      throw Error(ErrorKind::vanishing_divisor, "|R| falls below " + std::to_string(floor) + " at " + std::to_string(t));
    }
  }
  if (std::abs(R.base()) < floor) throw Error(ErrorKind::vanishing_divisor, "R(0) vanishes");
  std::vector<Atom> atoms;
  for (const auto& a : R.nu().atoms()) atoms.push_back({a.t, -a.mass / (R(a.t, Side::left) * R(a.t, Side::right))});
  const double l_lo = R.limit_lo(), l_hi = R.limit_hi();
  const bool zero_lo = std::abs(l_lo) <= floor, zero_hi = std::abs(l_hi) <= floor;
  std::vector<DensityPiece> ps;
  for (const auto& p : R.nu().pieces()) {
    Fn f = p.f;
    ps.push_back({p.lo, p.hi, [R, f](double t) { const double r = R(t); return -f(t) / (r * r); },
                  (zero_lo && p.lo == R.lo()) ? EndKind::singular : p.lo_kind,
                  (zero_hi && p.hi == R.hi()) ? EndKind::singular : p.hi_kind});
  }
  ZonalMeasure nu(R.lo(), R.hi(), std::move(atoms), std::move(ps), !zero_lo && R.nu().lo_integrable(),
                  !zero_hi && R.nu().hi_integrable());
  if (R.has_closed_form()) {
    SidedFn e = R.closed_form();
    return BV0Function(std::move(nu), [e](double t, Side s) { return 1.0 / e(t, s); });
  }
  if (zero_lo || zero_hi) throw Error(ErrorKind::non_integrable, "reciprocal without closed form is unbounded at an end");
  return BV0Function(1.0 / R.base(), std::move(nu), 1.0 / l_lo, 1.0 / l_hi);
}

BV0Function power(const BV0Function& R, int k) {
  if (k < 1) throw Error(ErrorKind::invalid_argument, "power needs a positive integer");
  if (k == 1) return R;
  std::vector<Atom> atoms;
  for (const auto& a : R.nu().atoms())
    atoms.push_back({a.t, (std::pow(R(a.t, Side::left), k) - std::pow(R(a.t, Side::right), k)) / a.t});
  std::vector<DensityPiece> ps;
  for (const auto& p : R.nu().pieces()) {
    Fn f = p.f;
    ps.push_back({p.lo, p.hi, [R, f, k](double t) { return k * std::pow(R(t), k - 1) * f(t); }, p.lo_kind, p.hi_kind});
  }
  ZonalMeasure nu(R.lo(), R.hi(), std::move(atoms), std::move(ps), R.nu().lo_integrable(), R.nu().hi_integrable());
  if (R.has_closed_form()) {
    SidedFn e = R.closed_form();
    return BV0Function(std::move(nu), [e, k](double t, Side s) { return std::pow(e(t, s), k); });
  }
  return BV0Function(std::pow(R.base(), k), std::move(nu), std::pow(R.limit_lo(), k), std::pow(R.limit_hi(), k));
}

BV0Function root(const BV0Function& P, int k) {
  if (k < 1) throw Error(ErrorKind::invalid_argument, "root needs a positive integer");
  if (k == 1) return P;
  auto rt = [k](double x) { return std::pow(std::max(x, 0.0), 1.0 / k); };
  std::vector<Atom> atoms;
  for (const auto& a : P.nu().atoms()) atoms.push_back({a.t, (rt(P(a.t, Side::left)) - rt(P(a.t, Side::right))) / a.t});
  const bool zero_lo = P.limit_lo() <= 0.0, zero_hi = P.limit_hi() <= 0.0;
  std::vector<DensityPiece> ps;
  for (const auto& p : P.nu().pieces()) {
    Fn f = p.f;
    ps.push_back({p.lo, p.hi,
                  [P, f, k](double t) {
                    const double v = std::max(P(t), 0.0);
                    // P stays at zero where it vanishes, so nu_P has no mass there.
                    if (v == 0.0) return 0.0;
                    return f(t) / (k * std::pow(v, (k - 1.0) / k));
                  },
                  (zero_lo && p.lo == P.lo()) ? EndKind::singular : p.lo_kind,
                  (zero_hi && p.hi == P.hi()) ? EndKind::singular : p.hi_kind});
  }
  ZonalMeasure nu(P.lo(), P.hi(), std::move(atoms), std::move(ps), P.nu().lo_integrable(), P.nu().hi_integrable());
  // Pointwise root; integrating the density loses accuracy where P vanishes at an end.
  if (P.has_closed_form()) {
    SidedFn e = P.closed_form();
    return BV0Function(std::move(nu), [e, rt](double t, Side s) { return rt(e(t, s)); });
  }
  return BV0Function(std::move(nu), [P, rt](double t, Side s) { return rt(P(t, s)); });
}

BV0Function dilate(const BV0Function& R0, double a_minus, double a_plus) {
  if (!(a_minus < 0.0 && a_plus > 0.0)) throw Error(ErrorKind::invalid_argument, "dilation needs a- < 0 < a+");
  const double am = std::abs(a_minus);
  const BV0Function R = R0.restricted(a_minus, a_plus);
  auto z = [am, a_plus](double t) { return t >= 0.0 ? a_plus * t : am * t; };
  const double lo = R.lo() / am, hi = R.hi() / a_plus;
  std::vector<Atom> atoms;
  for (const auto& a : R.nu().atoms())
    atoms.push_back(a.t > 0.0 ? Atom{a.t / a_plus, a_plus * a.mass} : Atom{a.t / am, am * a.mass});
  std::vector<DensityPiece> ps;
  for (const auto& p : R.nu().pieces()) {
    Fn f = p.f;
    if (p.lo < 0.0) {
      const double v = std::min(p.hi, 0.0);
      ps.push_back({p.lo / am, v / am, [f, am](double y) { return am * am * f(am * y); }, p.lo_kind,
                    v == p.hi ? p.hi_kind : EndKind::regular});
    }
    if (p.hi > 0.0) {
      const double u = std::max(p.lo, 0.0);
      ps.push_back({u / a_plus, p.hi / a_plus, [f, a_plus](double y) { return a_plus * a_plus * f(a_plus * y); },
                    u == p.lo ? p.lo_kind : EndKind::regular, p.hi_kind});
    }
  }
  ZonalMeasure nu(lo, hi, std::move(atoms), std::move(ps), R.nu().lo_integrable(), R.nu().hi_integrable());
  if (R.has_closed_form()) {
    SidedFn e = R.closed_form();
    return BV0Function(std::move(nu), [e, z](double t, Side s) { return e(z(t), s); });
  }
  return BV0Function(R.base(), std::move(nu), R.limit_lo(), R.limit_hi());
}

BV0Function reflect(const BV0Function& R) {
  ZonalMeasure nu = R.nu().mirrored();
  if (R.has_closed_form()) {
    SidedFn e = R.closed_form();
    return BV0Function(std::move(nu), [e](double t, Side s) { return e(-t, flip(s)); });
  }
  return BV0Function(R.base(), std::move(nu), R.limit_hi(), R.limit_lo());
}

BV0Function from_smooth(std::function<double(double)> R, std::function<double(double)> derivative,
                        SmoothOptions options) {
  double curvature = 0.0;
  if (options.second_derivative_at_zero) {
    curvature = *options.second_derivative_at_zero;
  } else {
    double prev = 0.0;
    for (int k = 3; k <= 6; ++k) {
      const double h = std::pow(10.0, -k);
      const double q = (derivative(h) - derivative(-h)) / (2 * h);
      if (!std::isfinite(q) || (k > 3 && std::abs(q) > 5.0 * std::abs(prev) + 1.0)) {
        throw Error(ErrorKind::singular_at_zero, "R'(s)/s has no finite limit at 0");
      }
      prev = q;
      curvature = q;
    }
  }
  const double gap = 1e-7;
  Fn density = [derivative, curvature, gap](double s) {
    if (std::abs(s) < gap) return -curvature;
    return -derivative(s) / s;
  };
  ZonalMeasure nu(options.lo, options.hi, {}, {{options.lo, options.hi, density, options.lo_kind, options.hi_kind}});
  return BV0Function(std::move(nu), [R](double t, Side) { return R(t); });
}

PositivityInterval positivity_interval(const BV0Function& R, double eps) {
  if (!(R.base() > eps)) throw Error(ErrorKind::invalid_argument, "R(0) must be positive");
  // R is monotone on either side of 0, so it can only die at a breakpoint of nu
  // or at a carrier end.
  const auto marks = R.nu().breakpoints();
  double hi = R.hi(), lo = R.lo();
  for (double c : marks) {
    if (c > 0.0 && c < R.hi() && !(R(c, Side::right) > eps)) {
      hi = c;
      break;
    }
  }
  for (auto it = marks.rbegin(); it != marks.rend(); ++it) {
    const double c = *it;
    if (c < 0.0 && c > R.lo() && !(R(c, Side::left) > eps)) {
      lo = c;
      break;
    }
  }
  return {lo, hi};
}

bool is_nonnegative(const ZonalMeasure& mu, double floor) { return mu.min_sample() >= floor; }

}  // namespace zonal
