#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "zonal/constants.hpp"
#include "zonal/error.hpp"
#include "zonal/estimates.hpp"

using namespace zonal;
using doctest::Approx;

namespace {

IntervalFunction fn(Fn f) { return IntervalFunction::on(std::move(f)); }

std::vector<BodyOfRevolution> bodies(int n) {
  return {catalog::ball(n, 1.3),         catalog::disk(n, 0.8),           catalog::cone(n, 0.4),
          catalog::cylinder(n, 1.0, 0.7), catalog::spheroid(n, 1.5, 0.6), catalog::with_segment(catalog::cone(n, -0.3), 0.5)};
}

std::vector<BodyOfRevolution> references(int n) {
  return {catalog::ball(n), catalog::spheroid(n, 0.9, 1.2), catalog::cylinder(n, 0.8, 0.5)};
}

}  // namespace

TEST_CASE("cap bound holds across the catalog") {
  const std::vector<double> ts = {0.05, 0.3, 0.6, 0.9, 1.0};
  int cases = 0;
  for (int n = 3; n <= 5; ++n) {
    for (int i = 1; i <= n - 2; ++i) {
      for (const auto& K : bodies(n)) {
        for (const auto& C : references(n)) {
          const auto family = repeated(C, n - 1 - i);
          for (Pole pole : {Pole::plus, Pole::minus}) {
            for (double t : ts) {
              const auto p = firey_bound(K, family, i, t, pole);
              CHECK(p.measured <= p.bound * (1 + 1e-9) + 1e-12);
              ++cases;
            }
          }
        }
      }
    }
  }
  CHECK(cases >= 300);
}

TEST_CASE("cap bound examples") {
  const int n = 4, i = 1;
  const auto balls = repeated(catalog::ball(n), n - 1 - i);
  // Ball: the cap mass decays faster than the bound.
  const auto near = firey_bound(catalog::ball(n), balls, i, 0.999, Pole::plus);
  const auto mid = firey_bound(catalog::ball(n), balls, i, 0.9, Pole::plus);
  CHECK(near.measured / near.bound < mid.measured / mid.bound);
  CHECK(near.measured / near.bound < 0.1);

  // Disk: measured / bound tends to t.
  for (double t : {0.99, 0.999}) {
    const auto p = firey_bound(catalog::disk(n), balls, i, t, Pole::minus);
    CHECK(p.measured / p.bound == Approx(t).epsilon(2 * (1 - t)));
  }

  // Full polar cap of a cylinder with a cylinder reference: both pole faces saturate.
  const auto cyl = repeated(catalog::cylinder(n, 1.0, 0.4), n - 1 - i);
  const auto top = firey_bound(catalog::cylinder(n, 0.7, 1.0), cyl, i, 1.0, Pole::plus);
  CHECK(top.measured == Approx(kappa(n - 1) * 0.7).epsilon(1e-10));
  CHECK(top.measured <= top.bound * (1 + 1e-12));

  CHECK_THROWS_AS(firey_bound(catalog::ball(n), balls, i, 0.0, Pole::plus), Error);
  CHECK_THROWS_AS(firey_bound(catalog::ball(n), balls, i, 1.5, Pole::plus), Error);
}

TEST_CASE("disk sharpness of the cap bound") {
  for (int n = 3; n <= 5; ++n) {
    for (int i = 1; i <= n - 2; ++i) {
      const int k = n - 1 - i;
      const auto balls = repeated(catalog::ball(n), k);
      std::vector<double> ratios;
      for (int m = 4; m < 16; ++m) {
        const double h = std::ldexp(1.0, -m), t = 1 - h;
        const auto p = firey_bound(catalog::disk(n), balls, i, t, Pole::plus);
        ratios.push_back(p.measured / std::pow(h * (2 - h), 0.5 * k));
      }
      const auto e = richardson(ratios);
      CAPTURE(n);
      CAPTURE(i);
      CHECK(e.converged);
      CHECK(e.value == Approx(kappa(n - 1)).epsilon(1e-4));
    }
  }
}

TEST_CASE("cap curve") {
  const int n = 3, i = 1;
  const auto c = cap_curve(catalog::spheroid(n, 1.2, 0.8), repeated(catalog::ball(n), 1), i, Pole::plus,
                           {0.1, 0.5, 0.9});
  REQUIRE(c.t.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(c.measured[k] <= c.bound[k]);
    CHECK(c.ratio[k] == Approx(c.measured[k] / c.bound[k]));
  }
}

TEST_CASE("richardson") {
  std::vector<double> v;
  for (int m = 0; m < 12; ++m) {
    const double h = std::ldexp(1.0, -m);
    v.push_back(2.0 + 3 * std::sqrt(h) - h + 0.5 * h * std::sqrt(h));
  }
  const auto e = richardson(v);
  CHECK(e.converged);
  CHECK(e.value == Approx(2.0).epsilon(1e-10));

  std::vector<double> logs;
  for (int m = 0; m < 12; ++m) {
    const double h = std::ldexp(1.0, -m);
    logs.push_back(-1.0 + h * std::log(h) + 2 * h - std::sqrt(h) * h * std::log(h));
  }
  const auto el = richardson(logs);
  CHECK(el.converged);
  CHECK(el.value == Approx(-1.0).epsilon(1e-9));

  std::vector<double> wobble = {1, 2, 1, 2, 1, 2};
  CHECK_FALSE(richardson(wobble).converged);
}

TEST_CASE("density limit at the poles") {
  for (int n = 3; n <= 5; ++n) {
    for (int i = 1; i <= n - 2; ++i) {
      const double unit = kappa(n - 1) / kappa(n - 1 - i);
      CAPTURE(n);
      CAPTURE(i);
      const auto ball = density_limit(catalog::ball(n), i, Pole::plus);
      CHECK(ball.predicted == 0.0);
      CHECK(std::abs(ball.estimate.value) <= 1e-3);

      const auto disk = density_limit(catalog::disk(n), i, Pole::minus);
      CHECK(disk.predicted == Approx(unit));
      CHECK(disk.estimate.converged);
      CHECK(std::abs(disk.estimate.value - disk.predicted) <= 1e-3 * (1 + disk.predicted));

      const auto cyl = density_limit(catalog::cylinder(n, 0.6, 1.1), i, Pole::plus);
      CHECK(cyl.predicted == Approx(std::pow(0.6, i) * unit));
      CHECK(cyl.estimate.converged);
      CHECK(std::abs(cyl.estimate.value - cyl.predicted) <= 1e-3 * (1 + cyl.predicted));
    }
  }
  CHECK_THROWS_AS(density_limit(catalog::segment(3, 1.0), 1, Pole::plus), Error);
}

TEST_CASE("cone valuation") {
  const int n = 3;
  const auto g = [](double t) { return t * t; };
  CHECK(cone_valuation(g, 0.5, n) == Approx(1.5 * M_PI));
  const double via_disk = integrate(g, disk_mixed_pushforward(catalog::cone(n, 0.5), 1));
  CHECK(via_disk == Approx(1.5 * M_PI).epsilon(1e-10));

  // Two ball references: the preimage has logarithmic ends.
  {
    const auto balls = repeated(catalog::ball(4), 2);
    const Fn gg = [](double t) { return 0.3 + 0.7 * t * t - 0.5 * std::cos(2 * t); };
    for (double s : {-0.6, 0.35}) {
      const double expected = cone_valuation(gg, s, 4);
      const auto v = valuation_pv(t_hat_inverse(balls, fn(gg)), catalog::cone(4, s), balls, 1);
      CHECK(v.pv.converged);
      CHECK(std::abs(v.pv.value - expected) <= 1e-6 * std::max(1.0, std::abs(expected)));
      CHECK(v.disk == Approx(expected).epsilon(1e-8));
    }
  }

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coef(-1, 1), param(0.1, 0.95);
  for (int trial = 0; trial < 10; ++trial) {
    const int dim = 3 + trial % 3;
    const int i = 1 + trial % (dim - 2);
    const double a = coef(rng), b = coef(rng), c = coef(rng), s = (trial % 2 ? 1 : -1) * param(rng);
    const Fn gg = [a, b, c](double t) { return a + b * t * t + c * std::cos(2 * t); };
    const auto K = catalog::cone(dim, s);
    const double expected = cone_valuation(gg, s, dim);
    CAPTURE(trial);
    CHECK(integrate(gg, disk_mixed_pushforward(K, i)) == Approx(expected).epsilon(1e-8));

    const auto balls = repeated(catalog::ball(dim), dim - 1 - i);
    const auto f = t_hat_inverse(balls, fn(gg));
    const auto v = valuation_pv(f, K, balls, i);
    const double scale = std::max(1.0, std::abs(expected));
    CHECK(v.disk == Approx(expected).epsilon(1e-8));
    CHECK(v.pv.converged);
    CHECK(std::abs(v.pv.value - expected) <= 1e-6 * scale);
  }
}

TEST_CASE("valuation is unchanged by linear additions") {
  const int n = 4, i = 1;
  const auto family = repeated(catalog::spheroid(n, 1.1, 0.9), n - 1 - i);
  const auto K = catalog::spheroid(n, 0.7, 1.3);
  const Fn base = [](double t) { return std::exp(t) + t * t; };
  const auto v0 = valuation_pv(fn(base), K, family, i);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 10; ++k) {
    const double c = u(rng);
    const auto v = valuation_pv(fn([base, c](double t) { return base(t) + c * t; }), K, family, i);
    CHECK(v.pv.value == Approx(v0.pv.value).epsilon(1e-8));
    CHECK(v.disk == Approx(v0.disk).epsilon(1e-8));
  }
  CHECK(std::abs(v0.pv.value - v0.disk) <= 1e-6 * std::max(1.0, std::abs(v0.disk)));

  // f(0) = 0 against a reference with a segment.
  const auto cyl = repeated(catalog::cylinder(n, 1.0, 0.6), n - 1 - i);
  const auto w = valuation_pv(fn([](double t) { return std::sin(t) + t * t; }), K, cyl, i);
  CHECK(std::abs(w.pv.value - w.disk) <= 1e-6 * std::max(1.0, std::abs(w.disk)));

  const auto lin = valuation_pv(fn([](double t) { return 2 * t; }), K, family, i);
  CHECK(std::abs(lin.pv.value) <= 1e-10);
  CHECK(std::abs(lin.disk) <= 1e-10);
}

TEST_CASE("support check examples") {
  const auto id = fn([](double t) { return t; });
  CHECK(support_check(id, -0.3, 0.2));
  CHECK(support_check(id, -1, 1));
  CHECK_FALSE(support_check(fn([](double t) { return t * t; }), -0.5, 0.5));
  const auto cone_ref = repeated(catalog::cone(4, 0.5), 2);
  const auto g = t_hat_apply(cone_ref, fn([](double t) { return std::cos(t); }));
  CHECK(support_check(g, cone_ref.a_minus, cone_ref.a_plus));
}
