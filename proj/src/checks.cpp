#include "zonal/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "zonal/constants.hpp"
#include "zonal/error.hpp"
#include "zonal/estimates.hpp"
#include "zonal/solver.hpp"

namespace zonal::checks {

namespace {

struct Tracker {
  double worst = 0.0;
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  // Records an error against its tolerance.
  void error(double e, double tol, const std::string& what) {
    ++cases;
    if (!(e <= tol)) {
      ++failures;
      if (first_failure.empty()) first_failure = what;
    }
    if (!std::isfinite(e)) e = INFINITY;
    worst = std::max(worst, e / tol);
  }
  void require(bool ok, const std::string& what) {
    ++cases;
    if (!ok) {
      ++failures;
      if (first_failure.empty()) first_failure = what;
    }
  }
};

Result finish(const Tracker& t, double tol, const std::string& summary) {
  Result r;
  r.pass = t.failures == 0 && t.cases > 0;
  r.worst = t.worst * tol;
  r.tolerance = tol;
  std::ostringstream os;
  os << summary << ", " << t.cases << " cases";
  if (t.failures) os << ", " << t.failures << " failed, first: " << t.first_failure;
  r.detail = os.str();
  return r;
}

IntervalFunction fn(Fn f) { return IntervalFunction::on(std::move(f)); }

double total_mass(const ZonalMeasure& mu) {
  return integrate([](double) { return 1.0; }, mu);
}

std::vector<Fn> test_functions() {
  return {[](double t) { return std::cos(2 * t); }, [](double t) { return std::exp(t); },
          [](double t) { return t * t * t - t; }, [](double t) { return 1 / (2 + t); },
          [](double t) { return std::sin(3 * t) + t * t; }};
}

std::string label(const std::string& name, int n, int i) {
  return name + " n=" + std::to_string(n) + " i=" + std::to_string(i);
}

BodyOfRevolution random_smooth(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> axis(0.5, 1.8);
  if (rng() % 4 == 0) return catalog::ball(n, axis(rng));
  return catalog::spheroid(n, axis(rng), axis(rng));
}

ZonalMeasure random_measure(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.95, 0.95), w(0.1, 1.0);
  std::vector<Atom> atoms;
  for (int k = 0; k < 3; ++k) atoms.push_back({u(rng), w(rng)});
  const double a = w(rng), b = u(rng);
  return ZonalMeasure(-1, 1, atoms, {{-1, 1, [a, b](double t) { return a + 0.3 * std::sin(5 * t + b); }}});
}

std::vector<BodyOfRevolution> six_bodies(int n) {
  return {catalog::ball(n, 1.3),          catalog::disk(n, 0.8),      catalog::cone(n, 0.4),
          catalog::cylinder(n, 1.0, 0.7), catalog::spheroid(n, 1.5, 0.6),
          catalog::with_segment(catalog::cone(n, -0.3), 0.5)};
}

double profile_gap(const BodyOfRevolution& got, const BodyOfRevolution& want, double lo, double hi) {
  double worst = 0.0;
  for (int k = 1; k < 40; ++k) {
    const double t = lo + (hi - lo) * k / 40;
    worst = std::max(worst, std::abs(got.profile(t) - want.profile(t)) / std::max(1.0, std::abs(want.profile(t))));
  }
  return worst;
}

}  // namespace

Result transformation_rule(const Options& o) {
  const double tol = 1e-6;
  std::mt19937 rng(o.seed);
  std::uniform_real_distribution<double> c(-1, 1);
  Tracker tr;
  const int trials = o.full ? 20 : 4;
  for (int k = 0; k < trials; ++k) {
    const int n = 3 + k % 3;
    const int i = 1 + static_cast<int>(rng() % (n - 2));
    const auto K = random_smooth(rng, n);
    std::vector<BodyOfRevolution> refs;
    for (int j = 0; j < n - 1 - i; ++j) refs.push_back(random_smooth(rng, n));
    const auto family = family_data(refs);
    const double a = c(rng), b = c(rng), d = c(rng), e = 1 + 2 * std::abs(c(rng));
    const Fn f = [a, b, d, e](double t) { return a + b * t * t + d * std::cos(e * t); };

    const ZonalMeasure direct = mixed_area_pushforward(K, i, family);
    const ZonalMeasure disk = disk_mixed_pushforward(K, i, kubota_factor(n, i) * o.kubota_scale);
    const IntervalFunction g = t_hat_apply(family, fn(f));
    const double lhs = integrate(f, direct);
    const double rhs = integrate([&g](double t) { return g(t); }, disk);
    tr.error(std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), tol, label(K.name, n, i));
  }
  return finish(tr, tol, "int f dS(K[i],C) against int T f dS(K[i],D)");
}

Result group_property(const Options& o) {
  const double tol = 1e-8;
  std::vector<std::pair<BV0Function, BV0Function>> pairs = {
      {catalog::ball(3).profile, catalog::ball(3).profile},
      {catalog::ball(3).profile, catalog::spheroid(3, 1.4, 0.8).profile},
      {catalog::spheroid(3, 0.6, 1.1).profile, catalog::ball(3, 2.0).profile},
      {catalog::cone(3, 0.5).profile, catalog::ball(3).profile},
      {catalog::ball(3).profile, catalog::cone(3, -0.4).profile},
      {catalog::cone(3, 0.6).profile, catalog::cone(3, -0.3).profile},
      {catalog::disk(3, 1.5).profile, catalog::spheroid(3, 2.0, 0.5).profile},
      {catalog::spheroid(3, 1.2, 0.9).profile, catalog::cone(3, 0.7).profile},
      {power(catalog::ball(3).profile, 2), catalog::spheroid(3, 0.8, 1.3).profile},
      {catalog::cone(3, -0.6).profile, catalog::spheroid(3, 1.7, 0.6).profile}};
  if (!o.full) pairs.resize(3);
  Tracker tr;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& [R, Q] = pairs[p];
    const auto RQ = product(R, Q);
    for (const auto& f0 : test_functions()) {
      const auto f = fn(f0);
      const auto lhs = t_apply(R, t_apply(Q, f));
      const auto rhs = t_apply(RQ, f);
      double worst = 0.0;
      for (int k = 0; k <= 57; ++k) {
        const double t = -0.95 + 1.9 * k / 57;
        worst = std::max(worst, std::abs(lhs(t) - rhs(t)));
      }
      tr.error(worst, tol, "pair " + std::to_string(p));
    }
  }
  return finish(tr, tol, "sup |T_R T_Q f - T_RQ f| on [-0.95, 0.95]");
}

Result adjoint_duality(const Options& o) {
  const double tol = 1e-8;
  std::mt19937 rng(o.seed + 1);
  Tracker tr;
  std::vector<BV0Function> profiles = {catalog::ball(4).profile, catalog::cone(3, 0.5).profile,
                                       catalog::spheroid(3, 1.5, 0.7).profile,
                                       product(catalog::ball(3).profile, catalog::cone(3, -0.3).profile)};
  for (const auto& R : profiles) {
    const auto d0 = adjoint_apply(R, ZonalMeasure::dirac(0.0));
    tr.require(d0.atoms().size() == 1 && d0.atom_at(0.0) == R.base() &&
                   d0.with_atom(0.0, -R.base()).total_variation() == 0.0, "T* delta_0");
  }
  if (!o.full) profiles.resize(2);
  const int trials = o.full ? 3 : 1;
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    const auto& R = profiles[p];
    const auto I = positivity_interval(R);
    for (int trial = 0; trial < trials; ++trial) {
      const auto sigma = random_measure(rng);
      const auto mu = adjoint_apply(R, sigma);
      for (const auto& f0 : test_functions()) {
        const auto Tf = t_apply(R, fn(f0));
        const double lhs = integrate([&](double t) { return Tf(t); }, sigma);
        const double rhs = integrate([&](double t) { return f0(std::clamp(t, I.lo, I.hi)); }, mu);
        tr.error(std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), tol, "duality, profile " + std::to_string(p));
      }
      TailIntegral smu(mu, [](double x) { return x; }), ssig(sigma, [](double x) { return x; });
      std::uniform_real_distribution<double> u(-0.98, 0.98);
      for (int k = 0; k < 20; ++k) {
        const double t = u(rng);
        const double lhs = t > 0 ? smu.upper(t, false) : smu.lower(t, false);
        const double rhs = R(t, Side::cross) * (t > 0 ? ssig.upper(t, false) : ssig.lower(t, false));
        tr.error(std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)), tol, "cap identity, profile " + std::to_string(p));
      }
    }
  }
  return finish(tr, tol, "int T f d sigma = int f d T* sigma and cap moments");
}

Result smooth_oracle(const Options& o) {
  const double tol = 1e-7;
  std::mt19937 rng(o.seed + 2);
  std::uniform_real_distribution<double> axis(0.5, 1.8);
  Tracker tr;
  const int trials = o.full ? 10 : 3;
  for (int k = 0; k < trials; ++k) {
    const int n = 3 + k % 3;
    const int i = 1 + static_cast<int>(rng() % (n - 2));
    const auto K = catalog::spheroid(n, axis(rng), axis(rng));
    std::vector<BodyOfRevolution> refs, all(i, K);
    for (int j = 0; j < n - 1 - i; ++j) {
      refs.push_back(catalog::spheroid(n, axis(rng), axis(rng)));
      all.push_back(refs.back());
    }
    const auto rho = smooth_density_oracle(all);
    const auto mu = mixed_area_pushforward(K, i, family_data(refs));
    for (double t : {-0.97, -0.6, -0.2, 0.05, 0.4, 0.8, 0.96}) {
      const double want = rho(t);
      tr.error(std::abs(mu.density_at(t) - want) / std::max(1.0, std::abs(want)), tol, label("spheroids", n, i));
    }
  }
  return finish(tr, tol, "pushforward density against the mixed discriminant");
}

Result round_trips(const Options& o) {
  const double tol = 1e-6;
  Tracker tr;
  const std::vector<int> dims = o.full ? std::vector<int>{3, 4, 5} : std::vector<int>{4};
  for (int n : dims) {
    std::vector<BodyOfRevolution> refs = {catalog::ball(n), catalog::spheroid(n, 0.9, 1.2),
                                          catalog::cylinder(n, 0.8, 0.5)};
    if (!o.full) refs.erase(refs.begin(), refs.begin() + 2);
    auto bodies = six_bodies(n);
    if (!o.full) bodies.resize(3);
    for (int i : {1, n - 2}) {
      for (const auto& ref : refs) {
        auto family = repeated(ref, n - 1 - i);
        family.equator_weight *= o.equator_scale;
        for (const auto& K : bodies) {
          const auto what = label(K.name, n, i) + " ref " + ref.name;
          const auto rep = solve(mixed_area_pushforward(K, i, family), family, n, i);
          if (!rep.body) {
            tr.require(false, what + " rejected (" + rep.failed_clause() + ")");
            continue;
          }
          tr.error(rep.residual, tol, what);
          tr.error(std::abs(rep.body->segment - K.segment), tol, what + " segment");
        }
      }
    }
    // Profiles recovered pointwise.
    const auto balls = repeated(catalog::ball(n), n - 2);
    for (const auto& K : {catalog::ball(n), catalog::cylinder(n, 0.8, 0.6)}) {
      const auto rep = solve(mixed_area_pushforward(K, 1, balls), balls, n, 1);
      if (!rep.body) {
        tr.require(false, label(K.name, n, 1) + " profile");
        continue;
      }
      tr.error(profile_gap(*rep.body, K, -0.999, 0.999), tol, label(K.name, n, 1) + " profile");
    }
    // Cone references: agreement on the positivity interval and the non-uniqueness flag.
    const auto cones = repeated(catalog::cone(n, 0.5), n - 2);
    const auto rep = solve(mixed_area_pushforward(catalog::ball(n), 1, cones), cones, n, 1);
    if (!rep.body) {
      tr.require(false, label("cone reference", n, 1));
      continue;
    }
    tr.require(rep.uniqueness == Uniqueness::non_unique_patchable, label("cone reference flag", n, 1));
    tr.error(rep.residual, tol, label("cone reference", n, 1));
    tr.error(profile_gap(*rep.body, catalog::ball(n), -0.999, 0.499), tol, label("cone reference profile", n, 1));
  }
  return finish(tr, tol, "solve(forward(K)) residual, segments and profiles");
}

Result negative_cases(const Options& o) {
  Tracker tr;
  const std::vector<int> dims = o.full ? std::vector<int>{3, 4, 5} : std::vector<int>{4};
  for (int n : dims) {
    const int i = 1;
    const auto balls = repeated(catalog::ball(n), n - 1 - i);
    const auto flat = check_conditions(ZonalMeasure::dirac(0.0, 2.0), balls, n, i);
    tr.require(flat.failed_clause() == "ii", label("equator only names " + flat.failed_clause(), n, i));

    const ZonalMeasure poles(-1, 1, {{1.0, kappa(n - 1)}, {-1.0, kappa(n - 1)}}, {});
    const auto caps = check_conditions(poles, balls, n, i);
    tr.require(caps.failed_clause() == "iv", label("pole atoms name " + caps.failed_clause(), n, i));

    const auto good = check_conditions(mixed_area_pushforward(catalog::ball(n), i, balls), balls, n, i);
    if (!good.passed()) {
      tr.require(false, label("reference case rejected", n, i));
      continue;
    }
    std::vector<DensityPiece> flipped;
    for (const auto& p : good.sigma.pieces()) {
      Fn f = p.f;
      // Half-strength flip: with a single ball reference a full flip already makes mu negative.
      flipped.push_back({p.lo, p.hi, [f](double t) { return (std::abs(t) > 0.2 && std::abs(t) < 0.3) ? -0.5 * f(t) : f(t); },
                         p.lo_kind, p.hi_kind});
    }
    const auto mu = t_hat_adjoint(balls, ZonalMeasure(-1, 1, good.sigma.atoms(), flipped));
    if (mu.min_sample() < 0.0) {
      tr.require(false, label("flipped input is not a measure", n, i));
      continue;
    }
    const auto bad = check_conditions(mu, balls, n, i);
    tr.require(bad.failed_clause() == "iii", label("sign flip names " + bad.failed_clause(), n, i));
  }
  return finish(tr, 1.0, "equator-only (ii), pole atoms (iv), sign-flipped preimage (iii)");
}

Result cap_bound(const Options& o) {
  Tracker tr;
  const std::vector<double> ts = o.full ? std::vector<double>{0.05, 0.3, 0.6, 0.9, 1.0} : std::vector<double>{0.3, 0.9};
  const std::vector<int> dims = o.full ? std::vector<int>{3, 4, 5} : std::vector<int>{4};
  int inequality_cases = 0;
  for (int n : dims) {
    std::vector<BodyOfRevolution> refs = {catalog::ball(n), catalog::spheroid(n, 0.9, 1.2), catalog::cylinder(n, 0.8, 0.5)};
    for (int i = 1; i <= n - 2; ++i) {
      for (const auto& K : six_bodies(n)) {
        for (const auto& C : refs) {
          const auto family = repeated(C, n - 1 - i);
          for (Pole pole : {Pole::plus, Pole::minus}) {
            for (double t : ts) {
              const auto p = firey_bound(K, family, i, t, pole);
              tr.require(p.measured <= p.bound * (1 + 1e-9) + 1e-12, label(K.name + " " + C.name, n, i));
              ++inequality_cases;
            }
          }
        }
      }
    }
  }
  if (o.full && inequality_cases < 300) tr.require(false, "fewer than 300 cases");

  const double tol = 1e-4;
  for (int n : dims) {
    for (int i = 1; i <= n - 2; ++i) {
      const int k = n - 1 - i;
      const auto balls = repeated(catalog::ball(n), k);
      std::vector<double> ratios;
      for (int m = 4; m < 16; ++m) {
        const double h = std::ldexp(1.0, -m);
        ratios.push_back(firey_bound(catalog::disk(n), balls, i, 1 - h, Pole::plus).measured / std::pow(h * (2 - h), 0.5 * k));
      }
      const auto e = richardson(ratios);
      const double coefficient = kappa(n - 1);
      tr.require(e.converged, label("disk sharpness not converged", n, i));
      tr.error(std::abs(e.value - coefficient) / coefficient, tol, label("disk sharpness", n, i));
    }
  }
  return finish(tr, tol, std::to_string(inequality_cases) + " inequality cases; disk cap ratio against its coefficient");
}

Result density_limits(const Options& o) {
  const double tol = 1e-3;
  Tracker tr;
  const std::vector<int> dims = o.full ? std::vector<int>{3, 4, 5} : std::vector<int>{4};
  for (int n : dims) {
    for (int i = 1; i <= n - 2; ++i) {
      for (const auto& [K, pole] : {std::pair{catalog::ball(n), Pole::plus}, std::pair{catalog::disk(n), Pole::minus},
                                    std::pair{catalog::cylinder(n, 0.6, 1.1), Pole::plus}}) {
        const auto d = density_limit(K, i, pole);
        tr.require(d.estimate.converged || d.predicted == 0.0, label(K.name + " not converged", n, i));
        tr.error(std::abs(d.estimate.value - d.predicted) / (1 + d.predicted), tol, label(K.name, n, i));
      }
    }
  }
  return finish(tr, tol, "extrapolated polar density against rho^i kappa_{n-1} / kappa_{n-1-i}");
}

Result cone_valuations(const Options& o) {
  const double tol = 1e-8, pv_tol = 1e-6;
  std::mt19937 rng(o.seed + 3);
  std::uniform_real_distribution<double> coef(-1, 1), param(0.1, 0.95);
  Tracker tr;
  const int trials = o.full ? 10 : 2;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 3 + trial % 3;
    const int i = 1 + trial % (n - 2);
    const double a = coef(rng), b = coef(rng), c = coef(rng), s = (trial % 2 ? 1 : -1) * param(rng);
    const Fn g = [a, b, c](double t) { return a + b * t * t + c * std::cos(2 * t); };
    const auto K = catalog::cone(n, s);
    const double expected = cone_valuation(g, s, n);
    const double scale = std::max(1.0, std::abs(expected));
    const double disk = integrate(g, disk_mixed_pushforward(K, i, kubota_factor(n, i) * o.kubota_scale));
    tr.error(std::abs(disk - expected) / scale, tol, label("disk route", n, i));

    const auto balls = repeated(catalog::ball(n), n - 1 - i);
    const auto v = valuation_pv(t_hat_inverse(balls, fn(g)), K, balls, i);
    tr.require(v.pv.converged, label("principal value not converged", n, i));
    // Reported against the tighter tolerance so that the worst ratio is comparable.
    tr.error(std::abs(v.pv.value - expected) / scale * (tol / pv_tol), tol, label("principal value", n, i));
  }
  return finish(tr, tol, "disk route to 1e-8 and principal value to 1e-6 (scaled) against kappa_{n-1}(g(-sign s) + g(s)/|s|)");
}

Result total_masses(const Options& o) {
  const double tol = 1e-8;
  Tracker tr;
  const std::vector<int> dims = o.full ? std::vector<int>{3, 4, 5, 6} : std::vector<int>{4};
  auto sphere_area = [](int m) {
    // omega_m = omega_{m-1} int_{-1}^{1} (1-t^2)^{(m-3)/2} dt, from omega_1 = 2.
    double w = 2.0;
    for (int j = 2; j <= m; ++j) w *= boost::math::beta(0.5, 0.5 * (j - 1));
    return w;
  };
  for (int n : dims) {
    for (int i = 1; i <= n - 1; ++i) {
      const auto balls = repeated(catalog::ball(n), n - 1 - i);
      const double forward = total_mass(mixed_area_pushforward(catalog::ball(n), i, balls));
      const double want = sphere_area(n);
      tr.error(std::abs(forward - want) / want, tol, label("forward ball", n, i));

      const double kub = kubota_factor(n, i) * o.kubota_scale;
      const double disk = total_mass(disk_mixed_pushforward(catalog::ball(n), i, kub));
      const double chain = sphere_area(i + 1) * kappa(n - 1) / kappa(i) * (kappa(i) * i / sphere_area(i));
      const double direct = total_mass(mixed_area_pushforward(catalog::ball(n), i, repeated(catalog::disk(n), n - 1 - i)));
      tr.error(std::abs(disk - chain) / chain, tol, label("disk chain", n, i));
      tr.error(std::abs(disk - direct) / direct, tol, label("disk against direct", n, i));
    }
  }
  return finish(tr, tol, "total masses against beta-integral sphere areas");
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {1, "transformation rule", transformation_rule}, {2, "group property", group_property},
      {3, "adjoint duality and cap identity", adjoint_duality}, {4, "smooth density oracle", smooth_oracle},
      {5, "round trips", round_trips}, {6, "negative cases", negative_cases},
      {7, "cap bound and disk sharpness", cap_bound}, {8, "polar density limit", density_limits},
      {9, "cone valuation", cone_valuations}, {10, "total masses", total_masses}};
  return entries;
}

Result run(const Entry& e, const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  Result r;
  try {
    r = e.run(o);
  } catch (const std::exception& ex) {
    r.pass = false;
    r.detail = std::string("exception: ") + ex.what();
  }
  r.id = e.id;
  r.name = e.name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace zonal::checks
