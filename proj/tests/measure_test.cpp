#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "zonal/constants.hpp"
#include "zonal/error.hpp"
#include "zonal/measure.hpp"

using namespace zonal;
using doctest::Approx;

namespace {

const double pi = std::numbers::pi;

ZonalMeasure arcsine() {
  return ZonalMeasure::with_density([](double t) { return 1.0 / std::sqrt((1 - t) * (1 + t)); }, -1, 1,
                                    EndKind::singular, EndKind::singular);
}

}  // namespace

TEST_CASE("integrate against atoms and densities") {
  CHECK(integrate([](double t) { return t; }, ZonalMeasure::dirac(0.5)) == 0.5);
  auto lebesgue = ZonalMeasure::with_density([](double) { return 1.0; });
  CHECK(integrate([](double) { return 1.0; }, lebesgue) == Approx(2.0).epsilon(1e-14));
  auto sphere = ZonalMeasure::with_density([](double) { return 2 * pi; });
  CHECK(integrate([](double) { return 1.0; }, sphere) == Approx(omega(3)).epsilon(1e-12));
}

TEST_CASE("singular endpoint densities") {
  CHECK(integrate([](double) { return 1.0; }, arcsine()) == Approx(pi).epsilon(1e-10));
  // Beta integral: int (1-t^2)^{-3/4} = B(1/2, 1/4)
  auto m = ZonalMeasure::with_density([](double t) { return std::pow((1 - t) * (1 + t), -0.75); }, -1, 1,
                                      EndKind::singular, EndKind::singular);
  const double beta = std::tgamma(0.5) * std::tgamma(0.25) / std::tgamma(0.75);
  CHECK(integrate([](double) { return 1.0; }, m) == Approx(beta).epsilon(1e-8));
}

TEST_CASE("non-integrable density is reported") {
  auto m = ZonalMeasure::with_density([](double t) { return 1.0 / ((1 - t) * (1 + t)); }, -1, 1, EndKind::singular,
                                      EndKind::singular);
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, m), Error);
  // A weight vanishing fast enough makes it integrable.
  CHECK(integrate([](double t) { return (1 - t) * (1 + t); }, m) == Approx(2.0).epsilon(1e-10));
}

TEST_CASE("cap masses") {
  auto poles = ZonalMeasure(-1, 1, {{-1, 1}, {1, 1}}, {});
  CHECK(cap_mass(poles, 0.3, Pole::plus) == 1.0);
  auto sphere = ZonalMeasure::with_density([](double) { return 2 * pi; });
  for (double t : {0.1, 0.5, 0.9, 1.0}) CHECK(cap_mass(sphere, t, Pole::plus) == Approx(2 * pi * (1 - t)).epsilon(1e-12));
  CHECK(cap_mass(ZonalMeasure::zero(), 0.5, Pole::minus) == 0.0);
  // closed at t
  CHECK(cap_mass(ZonalMeasure::dirac(0.5), 0.5, Pole::plus) == 1.0);
  CHECK(cap_mass(ZonalMeasure::dirac(-0.5), 0.5, Pole::minus) == 1.0);
}

TEST_CASE("moments") {
  auto poles = ZonalMeasure(-1, 1, {{-1, 1}, {1, 1}}, {});
  CHECK(moment(poles, MomentKind::first) == 0.0);
  auto ramp = ZonalMeasure(-1, 1, {}, {{0, 1, [](double t) { return t; }}});
  CHECK(moment(ramp, MomentKind::first) == Approx(1.0 / 3).epsilon(1e-12));
  CHECK(moment(ZonalMeasure::dirac(0.5), MomentKind::positive_part_first) == 0.5);
  CHECK(moment(ZonalMeasure::dirac(-0.5), MomentKind::positive_part_first) == 0.0);
}

TEST_CASE("restriction") {
  CHECK(restrict(ZonalMeasure::dirac(1), Interval::open(-1, 1)).is_zero());
  auto r = restrict(ZonalMeasure::dirac(0.5), Interval::closed(0, 1));
  CHECK(r.atom_at(0.5) == 1.0);
  auto lebesgue = ZonalMeasure::with_density([](double) { return 1.0; });
  CHECK(moment(restrict(lebesgue, Interval::closed(0, 1)), MomentKind::total) == Approx(1.0));
}

TEST_CASE("linearity, monotone caps, reflection and restriction properties") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const double a1 = U(rng), a2 = U(rng), b1 = U(rng), b2 = U(rng), c = U(rng);
    Fn f = [=](double t) { return a1 + a2 * t * t + std::sin(3 * t); };
    Fn g = [=](double t) { return b1 * t + b2 * std::exp(t); };
    auto mu = ZonalMeasure(-1, 1, {{U(rng), std::abs(U(rng))}, {1.0, 0.3}},
                           {{-1, 0.2, [=](double t) { return 1 + c * t; }, EndKind::regular, EndKind::regular},
                            {0.2, 1, [](double t) { return std::sqrt(1 - t); }, EndKind::regular, EndKind::singular}});
    auto nu = arcsine().scaled(0.5);
    const double lhs = integrate([&](double t) { return 2 * f(t) - 3 * g(t); }, mu);
    const double rhs = 2 * integrate(f, mu) - 3 * integrate(g, mu);
    CHECK(lhs == Approx(rhs).epsilon(1e-10).scale(1));
    CHECK(integrate(f, mu + nu) == Approx(integrate(f, mu) + integrate(f, nu)).epsilon(1e-10).scale(1));

    auto even = mu + mu.mirrored();
    CHECK(std::abs(moment(even, MomentKind::first)) < 1e-10);

    const double split = U(rng);
    auto half = restrict(mu, {split, 1, false, true});
    CHECK(integrate(f, half) ==
          Approx(mu.integrate(f, {split, 1, false, true})).epsilon(1e-10).scale(1));
  }
  auto sphere = ZonalMeasure::with_density([](double) { return 2 * pi; }).with_atom(0.5, 1.0);
  double prev = cap_mass(sphere, 1e-3, Pole::plus);
  for (double t = 0.01; t <= 1.0; t += 0.01) {
    const double now = cap_mass(sphere, t, Pole::plus);
    CHECK(now <= prev + 1e-12);
    prev = now;
  }
}

TEST_CASE("tail integrals keep relative accuracy near the ends") {
  auto mu = arcsine();
  TailIntegral tail(mu, [](double s) { return s; });
  for (double d : {1e-2, 1e-5, 1e-9, 1e-12}) {
    const double t = 1 - d;
    const double exact = std::sqrt((1 - t) * (1 + t));  // int_t^1 s / sqrt(1-s^2)
    CHECK(tail.upper(t, true) == Approx(exact).epsilon(1e-8));
    CHECK(-tail.lower(-t, true) == Approx(exact).epsilon(1e-8));
  }
  CHECK(std::abs(tail.total()) < 1e-12);
  auto with_atoms = ZonalMeasure(-1, 1, {{0.5, 2.0}}, {});
  TailIntegral at(with_atoms, [](double s) { return s; });
  CHECK(at.upper(0.5, true) == 1.0);
  CHECK(at.upper(0.5, false) == 0.0);
  CHECK(at.lower(0.5, true) == 1.0);
  CHECK(at.lower(0.5, false) == 0.0);
}
