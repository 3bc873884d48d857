#include "zonal/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "zonal/constants.hpp"
#include "zonal/error.hpp"

namespace zonal {

double IntervalFunction::operator()(double t) const {
  if (t < lo) {
    if (slope_lo) return *slope_lo * t;
    throw Error(ErrorKind::not_in_domain, "evaluation below the carrier at " + std::to_string(t));
  }
  if (t > hi) {
    if (slope_hi) return *slope_hi * t;
    throw Error(ErrorKind::not_in_domain, "evaluation above the carrier at " + std::to_string(t));
  }
  if (t == lo && limit_lo) return *limit_lo;
  if (t == hi && limit_hi) return *limit_hi;
  return map(t);
}

IntervalFunction IntervalFunction::on(Fn f, double lo, double hi) {
  IntervalFunction g;
  g.lo = lo;
  g.hi = hi;
  g.map = std::move(f);
  return g;
}

IntervalFunction IntervalFunction::extended() const {
  IntervalFunction g = *this;
  if (lo > -1.0 && lo < 0.0) g.slope_lo = (*this)(lo) / lo;
  if (hi < 1.0 && hi > 0.0) g.slope_hi = (*this)(hi) / hi;
  return g;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::member: return "member";
    case Verdict::nonmember: return "nonmember";
    case Verdict::undecided: return "undecided";
  }
  return "?";
}

LimitEstimate probe_limit(const std::function<double(double)>& g, double end, double inside, int levels) {
  std::vector<double> v;
  for (int m = 1; m <= levels; ++m) {
    const double t = end - std::ldexp(end - inside, -m);
    if (t == end) break;
    const double x = g(t);
    if (!std::isfinite(x)) return {Verdict::nonmember, x};
    v.push_back(x);
  }
  const std::size_t M = v.size();
  if (M < 10) return {Verdict::undecided, M ? v.back() : 0.0};
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); };

  if (close(v[M - 2], v[M - 1]) && close(v[M - 3], v[M - 2])) return {Verdict::member, v[M - 1]};

  bool stalled = true;
  for (std::size_t k = M - 8; k < M; ++k) {
    const double prev = std::abs(v[k - 1] - v[k - 2]), cur = std::abs(v[k] - v[k - 1]);
    if (cur < 0.9 * prev) stalled = false;
  }
  if (stalled || std::abs(v[M - 1]) > 1e6 * std::max(1.0, std::abs(v[0]))) return {Verdict::nonmember, v[M - 1]};

  std::vector<double> aitken;
  for (std::size_t k = M - 3; k < M; ++k) {
    const double d1 = v[k] - v[k - 1], d0 = v[k - 1] - v[k - 2];
    const double den = d1 - d0;
    aitken.push_back(den == 0.0 ? v[k] : v[k] - d1 * d1 / den);
  }
  if (close(aitken[0], aitken[1]) && close(aitken[1], aitken[2])) return {Verdict::member, aitken[2]};
  return {Verdict::undecided, aitken[2]};
}

namespace {

double one_minus_sq(double t) { return (1.0 - t) * (1.0 + t); }

// Integrals of f against nu from 0 toward either end: (0, t] for t > 0 and
// [t, 0) for t < 0. Tables are built lazily on dyadic segments approaching the
// ends, so interior queries never touch the integrand close to an end.
class NuPartial {
 public:
  NuPartial(const ZonalMeasure& nu, Fn f) : nu_(nu), f_(std::move(f)) {
    for (const auto& a : nu_.atoms())
      if (a.t != 0.0) atoms_.push_back({a.t, a.mass});
  }

  double operator()(double t) const {
    if (t == 0.0) return 0.0;
    const bool upper = t > 0.0;
    const double end = upper ? nu_.hi() : nu_.lo();
    Branch& side = upper ? up_ : down_;
    std::lock_guard<std::mutex> lock(mutex_);
    const double d = std::abs(t) / std::abs(end);
    // Segment j covers relative positions (1 - 2^-j, 1 - 2^-(j+1)].
    std::size_t j = 0;
    while (j < 60 && d > 1.0 - std::ldexp(1.0, -static_cast<int>(j) - 1)) ++j;
    build(side, upper, j);
    const auto& seg = side.segs[j];
    double partial = 0.0;
    for (const auto& tab : seg.tables) {
      if (upper) {
        partial += tab.lower(std::min(t, tab.hi()));
      } else {
        partial += tab.upper(std::max(t, tab.lo()));
      }
    }
    double atoms = 0.0;
    for (const auto& a : atoms_)
      if (upper ? (a.t > 0.0 && a.t <= t) : (a.t < 0.0 && a.t >= t)) atoms += weight(a);
    return seg.before + partial + atoms;
  }

  // Full integral over (0, hi] or [lo, 0), when f nu is integrable there.
  std::optional<double> total(bool upper) const {
    const double end = upper ? nu_.hi() : nu_.lo();
    if (end == 0.0) return 0.0;
    try {
      const double half = 0.5 * end;
      const double inner = (*this)(half);
      const ZonalMeasure rest = nu_.restricted(upper ? Interval{half, end, false, true} : Interval{end, half, true, false});
      // f may blow up at the end of its carrier even where nu is regular.
      double v = inner;
      for (const auto& a : rest.atoms()) v += f_(a.t) * a.mass;
      for (const auto& p : rest.pieces()) {
        quad::PanelShape shape = p.shape();
        if (p.hi == end) shape.hi_kind = EndKind::singular;
        if (p.lo == end) shape.lo_kind = EndKind::singular;
        const Fn f = f_, g = p.f;
        v += quad::integrate([f, g](double x) { return f(x) * g(x); }, shape, p.lo, p.hi);
      }
      if (std::isfinite(v)) return v;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::non_integrable && e.kind() != ErrorKind::not_in_domain) throw;
    }
    return std::nullopt;
  }

 private:
  struct Segment {
    double before = 0.0;
    std::vector<quad::CumulativeTable> tables;
  };
  struct Branch {
    std::vector<Segment> segs;
    double running = 0.0;
  };

  double weight(const Atom& a) const {
    auto& cache = weights_[a.t];
    if (!cache) cache = f_(a.t) * a.mass;
    return *cache;
  }

  void build(Branch& side, bool upper, std::size_t j) const {
    const double end = upper ? nu_.hi() : nu_.lo();
    while (side.segs.size() <= j) {
      const int k = static_cast<int>(side.segs.size());
      const double a = k == 0 ? 0.0 : end * (1.0 - std::ldexp(1.0, -k));
      const double b = end * (1.0 - std::ldexp(1.0, -k - 1));
      const double u = std::min(a, b), v = std::max(a, b);
      Segment seg;
      seg.before = side.running;
      Fn f = f_;
      for (const auto& p : nu_.pieces()) {
        const double lo = std::max(u, p.lo), hi = std::min(v, p.hi);
        if (!(hi > lo)) continue;
        const Fn g = p.f;
        quad::PanelShape shape{lo, hi, lo == p.lo ? p.lo_kind : EndKind::regular,
                               hi == p.hi ? p.hi_kind : EndKind::regular};
        seg.tables.emplace_back([f, g](double x) { return f(x) * g(x); }, shape);
      }
      double sum = 0.0;
      for (const auto& tab : seg.tables) sum += tab.total();
      side.running += sum;
      side.segs.push_back(std::move(seg));
    }
  }

  ZonalMeasure nu_;
  Fn f_;
  std::vector<Atom> atoms_;
  mutable std::map<double, std::optional<double>> weights_;
  mutable Branch up_, down_;
  mutable std::mutex mutex_;
};

struct TransformState {
  BV0Function R;
  IntervalFunction f;
  double am = -1.0, ap = 1.0;
  std::unique_ptr<NuPartial> partial;
  std::once_flag once_lo, once_hi;
  double end_lo = 0.0, end_hi = 0.0;

  double interior(double t) const {
    if (t == 0.0) return R.base() * f(0.0);
    if (t > 0.0) return R(t, Side::right) * f(t) + t * (*partial)(t);
    return R(t, Side::left) * f(t) - t * (*partial)(t);
  }

  // R(end) f(end), zero when R vanishes there.
  double edge(double end) const {
    if (end == R.hi() || end == R.lo()) {
      const double lim = end > 0.0 ? R.limit_hi() : R.limit_lo();
      return std::abs(lim) <= 1e-13 ? 0.0 : lim * f(end);
    }
    return 0.0;
  }

  // Value of T f at the end of the positivity interval.
  double end_value(bool upper) {
    auto compute = [&]() {
      const double a = upper ? ap : am;
      double v = std::numeric_limits<double>::quiet_NaN();
      if (const auto total = partial->total(upper)) {
        try {
          v = edge(a) + std::abs(a) * *total;
        } catch (const Error&) {
          v = std::numeric_limits<double>::quiet_NaN();
        }
      }
      if (!std::isfinite(v)) {
        const auto est = probe_limit([this](double t) { return interior(t); }, a, 0.5 * a);
        v = est.verdict == Verdict::member ? est.value : std::numeric_limits<double>::quiet_NaN();
      }
      (upper ? end_hi : end_lo) = v;
    };
    std::call_once(upper ? once_hi : once_lo, compute);
    return upper ? end_hi : end_lo;
  }

  double value(double t) {
    if (t >= ap) return t * end_value(true) / ap;
    if (t <= am) return t * end_value(false) / am;
    return interior(t);
  }
};

std::shared_ptr<TransformState> make_state(const BV0Function& R, const IntervalFunction& f) {
  auto st = std::make_shared<TransformState>();
  st->R = R;
  st->f = f;
  const auto I = positivity_interval(R);
  st->am = I.lo;
  st->ap = I.hi;
  const ZonalMeasure nu = R.nu().restricted(Interval::closed(I.lo, I.hi));
  st->partial = std::make_unique<NuPartial>(nu, [f](double s) { return f(s); });
  return st;
}

}  // namespace

IntervalFunction t_apply(const BV0Function& R, const IntervalFunction& f) {
  auto st = make_state(R, f);
  IntervalFunction g;
  g.lo = -1.0;
  g.hi = 1.0;
  g.map = [st](double t) { return st->value(t); };
  return g;
}

IntervalFunction t_hat_apply(const ReferenceFamily& family, const IntervalFunction& f) {
  IntervalFunction g = t_apply(family.profile, f);
  const double c = family.correction();
  if (c == 0.0) return g;
  const double f0 = f(0.0);
  Fn inner = g.map;
  g.map = [inner, c, f0](double t) { return inner(t) + c * f0 * std::abs(t); };
  return g;
}

bool support_check(const IntervalFunction& g, double lo, double hi, double tol) {
  const int samples = 64;
  double scale = 1.0, worst = 0.0;
  auto sweep = [&](double end, double edge_t) {
    const double ratio = g(edge_t) / edge_t;
    for (int k = 1; k <= samples; ++k) {
      const double t = edge_t + (end - edge_t) * k / samples;
      const double v = g(t);
      scale = std::max(scale, std::abs(v));
      worst = std::max(worst, std::abs(v - ratio * t));
    }
  };
  if (hi < 1.0) sweep(1.0, hi);
  if (lo > -1.0) sweep(-1.0, lo);
  return worst <= tol * scale;
}

IntervalFunction t_inverse(const BV0Function& R, const IntervalFunction& g, double tol) {
  const auto I = positivity_interval(R);
  if (!support_check(g, I.lo, I.hi, tol)) {
    throw Error(ErrorKind::not_in_image, "function is not linear outside the positivity interval");
  }
  const BV0Function Q = reciprocal(R.restricted(I.lo, I.hi));
  IntervalFunction inner = IntervalFunction::on([g](double t) { return g(t); }, I.lo, I.hi);
  IntervalFunction f = t_apply(Q, inner);
  f.lo = I.lo;
  f.hi = I.hi;
  return f;
}

IntervalFunction t_hat_inverse(const ReferenceFamily& family, const IntervalFunction& g, double tol) {
  IntervalFunction f = t_inverse(family.profile, g, tol);
  const double c = family.correction();
  if (c == 0.0) return f;
  const double r0 = family.profile.base();
  const double k = c * g(0.0) / (r0 * r0);
  Fn inner = f.map;
  f.map = [inner, k](double t) { return inner(t) - k * std::abs(t); };
  return f;
}

Membership d_membership(const BV0Function& R, const IntervalFunction& f) {
  const auto I = positivity_interval(R);
  const ZonalMeasure nu = R.nu().restricted(Interval::closed(I.lo, I.hi));
  Fn fw = [f](double s) { return f(s); };
  Membership out;

  auto side = [&](double a, LimitEstimate& product, LimitEstimate& integral) {
    const bool upper = a > 0.0;
    double fa = std::numeric_limits<double>::quiet_NaN();
    try {
      fa = f(a);
    } catch (const Error&) {
    }
    auto partial = [&](double t) {
      return upper ? nu.integrate(fw, Interval{0.0, t, false, true}) : nu.integrate(fw, Interval{t, 0.0, true, false});
    };
    if (std::isfinite(fa)) {
      const double r = upper ? R(a, Side::left) : R(a, Side::right);
      product = {Verdict::member, r * fa};
      try {
        const double v = upper ? nu.integrate(fw, Interval{0.0, a, false, false})
                               : nu.integrate(fw, Interval{a, 0.0, false, false});
        integral = {Verdict::member, v};
      } catch (const Error&) {
        integral = {Verdict::nonmember, std::numeric_limits<double>::infinity()};
      }
      return;
    }
    product = probe_limit([&](double t) { return R(t, upper ? Side::left : Side::right) * f(t); }, a, 0.5 * a);
    try {
      integral = probe_limit(partial, a, 0.5 * a);
    } catch (const Error&) {
      integral = {Verdict::undecided, std::numeric_limits<double>::quiet_NaN()};
    }
  };
  side(I.hi, out.product_hi, out.integral_hi);
  side(I.lo, out.product_lo, out.integral_lo);
  const Verdict all[] = {out.product_hi.verdict, out.integral_hi.verdict, out.product_lo.verdict,
                         out.integral_lo.verdict};
  out.verdict = Verdict::member;
  for (Verdict v : all) {
    if (v == Verdict::nonmember) {
      out.verdict = Verdict::nonmember;
      break;
    }
    if (v == Verdict::undecided) out.verdict = Verdict::undecided;
  }
  return out;
}

namespace {

double safe_eval(const BV0Function& R, double t, Side side) {
  if (t < R.lo() || t > R.hi()) return 0.0;
  return R(t, side);
}

std::shared_ptr<TailIntegral> first_moment_tails(const ZonalMeasure& sigma) {
  return std::make_shared<TailIntegral>(sigma, [](double s) { return s; });
}

// Oriented integral of s sigma(ds) from t to sign(t): over [t, 1] for t >= 0 and
// minus the integral over [-1, t] for t < 0.
double outer_tail(const TailIntegral& G, double t) { return t >= 0.0 ? G.upper(t, true) : -G.lower(t, true); }

}  // namespace

ZonalMeasure adjoint_apply(const BV0Function& R, const ZonalMeasure& sigma) {
  const ZonalMeasure& nu = R.nu();
  auto G = first_moment_tails(sigma);
  std::vector<Atom> atoms;
  for (const auto& a : sigma.atoms()) atoms.push_back({a.t, safe_eval(R, a.t, Side::cross) * a.mass});
  for (const auto& a : nu.atoms()) atoms.push_back({a.t, outer_tail(*G, a.t) * a.mass});

  const double lo = sigma.lo(), hi = sigma.hi();
  const auto cut = pieces::cuts(lo, hi, {sigma.breakpoints(), nu.breakpoints(), {0.0}});
  std::vector<DensityPiece> ps;
  for (std::size_t k = 0; k + 1 < cut.size(); ++k) {
    const double u = cut[k], v = cut[k + 1];
    const DensityPiece* p = pieces::covering(sigma.pieces(), u, v);
    const DensityPiece* q = pieces::covering(nu.pieces(), u, v);
    if (!p && !q) continue;
    Fn sp = p ? p->f : Fn{}, np = q ? q->f : Fn{};
    Fn dens = [sp, np, R, G](double t) {
      double d = 0.0;
      if (sp) d += sp(t) * safe_eval(R, t, Side::cross);
      if (np) d += outer_tail(*G, t) * np(t);
      return d;
    };
    ps.push_back({u, v, std::move(dens), pieces::worst(pieces::end_kind(p, u), pieces::end_kind(q, u)),
                  pieces::worst(pieces::end_kind(p, v), pieces::end_kind(q, v))});
  }
  return ZonalMeasure(lo, hi, std::move(atoms), std::move(ps), sigma.lo_integrable(), sigma.hi_integrable());
}

ZonalMeasure t_hat_adjoint(const ReferenceFamily& family, const ZonalMeasure& sigma) {
  ZonalMeasure mu = adjoint_apply(family.profile, sigma);
  const double c = family.correction();
  if (c == 0.0) return mu;
  return mu.with_atom(0.0, c * integrate([](double s) { return std::abs(s); }, sigma));
}

namespace {
constexpr double kCancellation = 1e-9;
// Both tails and R vanish at the end; past 2^-26 of the half interval the
// quadrature floor, not the measure, would decide the ratio.
constexpr int kEndProbeLevels = 26;
}  // namespace

PreimageReport adjoint_preimage(const BV0Function& R, const ZonalMeasure& mu_in, double c, PreimageOptions options) {
  PreimageReport rep;
  const auto I = positivity_interval(R, options.vanishing);
  rep.a_minus = I.lo;
  rep.a_plus = I.hi;
  const double r0 = R.base();
  ZonalMeasure mu = mu_in;
  if (c != 0.0) mu = mu.with_atom(0.0, -c / r0 * integrate([](double s) { return std::abs(s); }, mu_in));

  const BV0Function Rin = R.restricted(I.lo, I.hi);
  const BV0Function Q = reciprocal(Rin, options.vanishing);
  const ZonalMeasure& nq = Q.nu();
  auto H = first_moment_tails(mu);

  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms())
    if (a.t > I.lo && a.t < I.hi) atoms.push_back({a.t, a.mass / Rin(a.t, Side::cross)});
  for (const auto& a : nq.atoms()) atoms.push_back({a.t, outer_tail(*H, a.t) * a.mass});

  const bool zero_lo = std::abs(Rin.limit_lo()) <= options.vanishing;
  const bool zero_hi = std::abs(Rin.limit_hi()) <= options.vanishing;
  const auto cut = pieces::cuts(I.lo, I.hi, {mu.breakpoints(), nq.breakpoints(), {0.0}});
  std::vector<DensityPiece> ps;
  for (std::size_t k = 0; k + 1 < cut.size(); ++k) {
    const double u = cut[k], v = cut[k + 1];
    const DensityPiece* p = pieces::covering(mu.pieces(), u, v);
    const DensityPiece* q = pieces::covering(nq.pieces(), u, v);
    if (!p && !q) continue;
    Fn mp = p ? p->f : Fn{}, qp = q ? q->f : Fn{};
    // Near an end where R vanishes both terms blow up and may cancel exactly
    // (a pole face of K). Abscissae there carry relative error eps / distance,
    // so whatever is left below that level of the terms is zero.
    const double lo = I.lo, hi = I.hi;
    Fn dens = [mp, qp, Rin, H, lo, hi](double t) {
      const double a = mp ? mp(t) / Rin(t, Side::cross) : 0.0;
      const double b = qp ? outer_tail(*H, t) * qp(t) : 0.0;
      const double d = a + b;
      const double dist = std::min(t - lo, hi - t);
      const double level = kCancellation + 1e4 * std::numeric_limits<double>::epsilon() / dist;
      return std::abs(d) <= level * (std::abs(a) + std::abs(b)) ? 0.0 : d;
    };
    EndKind lk = pieces::worst(pieces::end_kind(p, u), pieces::end_kind(q, u));
    EndKind hk = pieces::worst(pieces::end_kind(p, v), pieces::end_kind(q, v));
    if (u == I.lo && zero_lo) lk = EndKind::singular;
    if (v == I.hi && zero_hi) hk = EndKind::singular;
    ps.push_back({u, v, std::move(dens), lk, hk});
  }
  ZonalMeasure interior(I.lo, I.hi, atoms, ps);

  try {
    (void)interior.total_variation();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::non_integrable) throw;
    rep.interior_finite = false;
  }

  // Endpoint atoms: limits of mu((t, a+]) / R(t) and mu([a-, t)) / R(t).
  auto ones = std::make_shared<TailIntegral>(mu, [](double) { return 1.0; });
  if (!zero_hi) {
    rep.end_hi = {Verdict::member, mu.atom_at(I.hi) / Rin.limit_hi()};
  } else {
    rep.end_hi = probe_limit([&](double t) { return ones->upper(t, false) / Rin(t, Side::left); }, I.hi, 0.5 * I.hi,
                             kEndProbeLevels);
  }
  if (!zero_lo) {
    rep.end_lo = {Verdict::member, mu.atom_at(I.lo) / Rin.limit_lo()};
  } else {
    rep.end_lo = probe_limit([&](double t) { return ones->lower(t, false) / Rin(t, Side::right); }, I.lo, 0.5 * I.lo,
                             kEndProbeLevels);
  }

  if (rep.end_hi.verdict == Verdict::member) atoms.push_back({I.hi, rep.end_hi.value});
  if (rep.end_lo.verdict == Verdict::member) atoms.push_back({I.lo, rep.end_lo.value});
  rep.sigma = ZonalMeasure(I.lo, I.hi, std::move(atoms), std::move(ps)).with_carrier(-1.0, 1.0);

  if (rep.interior_finite) {
    double scale = 1.0;
    for (const auto& a : rep.sigma.atoms()) scale = std::max(scale, std::abs(a.mass));
    rep.min_value = rep.sigma.min_sample();
    rep.nonnegative = rep.min_value >= -1e-10 * scale;
  }

  if (!rep.interior_finite) {
    rep.failure = "interior measure is not finite";
  } else if (rep.end_hi.verdict != Verdict::member || rep.end_lo.verdict != Verdict::member) {
    const bool hi_bad = rep.end_hi.verdict != Verdict::member;
    const auto& est = hi_bad ? rep.end_hi : rep.end_lo;
    rep.failure = std::string("endpoint limit at ") + (hi_bad ? "a+" : "a-") +
                  (est.verdict == Verdict::nonmember ? " diverges" : " is undecided");
  } else if (options.require_nonnegative && !rep.nonnegative) {
    rep.failure = "preimage has negative part " + std::to_string(rep.min_value);
  }
  if (!rep.feasible() && options.throw_if_infeasible) throw Error(ErrorKind::infeasible, rep.failure);
  return rep;
}

double sph_projection(const ReferenceFamily& family, const IntervalFunction& f, double s, int n, int k) {
  const int m = n - k;
  if (m < 1 || family.size() != m) throw Error(ErrorKind::dimension_mismatch, "family must hold n - k bodies");
  for (const auto& C : family.bodies)
    if (C.segment > 0.0) throw Error(ErrorKind::segment_in_boundary, C.name + " has a vertical boundary segment");
  if (!(std::abs(s) < 1.0)) throw Error(ErrorKind::invalid_argument, "height must lie in (-1, 1)");

  const double s2 = s * s;
  auto smooth = [m, s2](double t) { return std::pow(one_minus_sq(t) / (1.0 - s2 * t * t), 0.5 * m); };
  auto nu_smooth = ZonalMeasure::with_density(
      [m, s2, smooth](double t) {
        return smooth(t) * m * (1.0 - s2) / (one_minus_sq(t) * (1.0 - s2 * t * t));
      },
      -1.0, 1.0, EndKind::singular, EndKind::singular);
  BV0Function factor(std::move(nu_smooth), [smooth](double t, Side) { return smooth(t); });

  BV0Function shrunk;
  if (s > 0.0) {
    shrunk = dilate(family.profile, -s, s);
  } else if (s < 0.0) {
    shrunk = dilate(reflect(family.profile), s, -s);
  } else {
    shrunk = BV0Function::constant(family.profile.base());
  }
  const BV0Function P = product(factor, shrunk);
  const double value = P.nu().integrate([&f, s](double t) { return f(s * t); }, Interval::open(0.0, 1.0));
  return omega(m) / m * value;
}

}  // namespace zonal
