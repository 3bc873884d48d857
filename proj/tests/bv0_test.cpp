#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "zonal/bv0.hpp"
#include "zonal/error.hpp"

using namespace zonal;
using doctest::Approx;

namespace {

double one_minus_sq(double t) { return (1 - t) * (1 + t); }

BV0Function semicircle() {
  return from_smooth([](double t) { return std::sqrt(one_minus_sq(t)); },
                     [](double t) { return -t / std::sqrt(one_minus_sq(t)); });
}

BV0Function indicator_below(double r) {
  return BV0Function(ZonalMeasure::dirac(r, 1.0 / r), [r](double t, Side s) {
    if (t < r) return 1.0;
    if (t > r) return 0.0;
    return s == Side::left ? 1.0 : 0.0;
  });
}

double atom_mass(const ZonalMeasure& mu, double t) { return mu.atom_at(t); }

}  // namespace

TEST_CASE("evaluation from nu") {
  for (double c : {0.5, 1.0, -2.0}) {
    BV0Function R(1.0, ZonalMeasure::dirac(0.5, c));
    CHECK(R(0.7, Side::right) == Approx(1 - c / 2).epsilon(1e-14));
    CHECK(R(0.5, Side::left) == Approx(1.0).epsilon(1e-14));
    CHECK(R(0.5, Side::right) == Approx(1 - c / 2).epsilon(1e-14));
    CHECK(R(0.3) == Approx(1.0).epsilon(1e-14));
  }
  auto arcsine = ZonalMeasure::with_density([](double s) { return 1 / std::sqrt(one_minus_sq(s)); }, -1, 1,
                                            EndKind::singular, EndKind::singular);
  BV0Function R(1.0, arcsine);
  for (double t : {-0.999999, -0.9, -0.3, 0.1, 0.5, 0.99, 0.999999}) {
    CHECK(R(t, Side::right) == Approx(std::sqrt(one_minus_sq(t))).epsilon(1e-9));
    CHECK(R(t, Side::cross) == Approx(std::sqrt(one_minus_sq(t))).epsilon(1e-9));
  }
  CHECK(std::abs(R.limit_hi()) < 1e-11);
  BV0Function flat(2.5, ZonalMeasure::zero());
  for (double t : {-0.9, 0.0, 0.4}) {
    CHECK(flat(t, Side::left) == 2.5);
    CHECK(flat(t, Side::right) == 2.5);
  }
  CHECK_THROWS_AS(flat(1.5), Error);
}

TEST_CASE("product") {
  for (double r : {0.25, 0.5, 0.8}) {
    auto I = indicator_below(r);
    auto P = product(I, I);
    CHECK(atom_mass(P.nu(), r) == Approx(1 / r));
    CHECK(P.nu().atoms().size() == 1);
  }
  auto R = semicircle();
  auto same = product(R, BV0Function::constant(1.0));
  for (double t : {-0.7, 0.2, 0.9}) {
    CHECK(same(t) == Approx(R(t)));
    CHECK(same.nu().density_at(t) == Approx(R.nu().density_at(t)));
  }
  auto sq = product(R, R);
  for (double t : {-0.99, -0.5, 0.0, 0.3, 0.999}) CHECK(sq.nu().density_at(t) == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("reciprocal") {
  auto c = reciprocal(BV0Function::constant(4.0));
  CHECK(c(0.3) == 0.25);
  CHECK(c.nu().is_zero());
  auto R = semicircle();
  auto inv = reciprocal(R);
  for (double t : {-0.9, -0.2, 0.4, 0.95}) {
    CHECK(inv.nu().density_at(t) == Approx(-std::pow(one_minus_sq(t), -1.5)).epsilon(1e-12));
  }
  CHECK_FALSE(inv.nu().hi_integrable());
  auto unit = product(R, inv);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-0.999, 0.999);
  for (int k = 0; k < 50; ++k) CHECK(unit(U(rng)) == Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(reciprocal(indicator_below(0.5)), Error);
}

TEST_CASE("powers") {
  auto R = semicircle();
  auto same = power(R, 1);
  CHECK(same(0.3) == R(0.3));
  for (int n = 3; n <= 6; ++n) {
    auto P = power(R, n - 1);
    for (double t : {-0.9, 0.1, 0.7})
      CHECK(P.nu().density_at(t) == Approx((n - 1) * std::pow(one_minus_sq(t), (n - 3) / 2.0)).epsilon(1e-12));
  }
  auto p2 = power(R, 2), q2 = product(R, R);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-0.999, 0.999);
  for (int k = 0; k < 100; ++k) {
    const double t = U(rng);
    CHECK(p2(t) == Approx(q2(t)).epsilon(1e-13));
    CHECK(p2.nu().density_at(t) == Approx(q2.nu().density_at(t)).epsilon(1e-12));
  }
  auto I3 = power(indicator_below(0.5), 3);
  CHECK(atom_mass(I3.nu(), 0.5) == Approx(2.0));
}

TEST_CASE("dilation") {
  auto R = semicircle();
  auto same = dilate(R, -1, 1);
  for (double t : {-0.6, 0.3}) CHECK(same(t) == Approx(R(t)));
  const double r = 0.3;
  auto D = dilate(indicator_below(r), -1, 2 * r);
  CHECK(atom_mass(D.nu(), 0.5) == Approx(2.0));
  CHECK(D(0.4) == 1.0);
  CHECK(D(0.6) == 0.0);
  auto twice = dilate(dilate(R, -0.8, 0.6), -0.5, 0.9);
  auto once = dilate(R, -0.4, 0.54);
  for (double t : {-0.95, -0.3, 0.2, 0.97}) {
    CHECK(twice(t) == Approx(once(t)).epsilon(1e-12));
    CHECK(twice.nu().density_at(t) == Approx(once.nu().density_at(t)).epsilon(1e-12));
  }
  // nu of the dilation agrees with differentiating R(z(t))
  auto dR = dilate(R, -0.7, 0.9);
  for (double t : {0.3, 0.8}) {
    const double z = 0.9 * t;
    CHECK(dR.nu().density_at(t) == Approx(0.81 / std::sqrt(one_minus_sq(z))).epsilon(1e-12));
  }
}

TEST_CASE("reflection") {
  auto R = semicircle();
  auto F = reflect(R);
  for (double t : {-0.8, 0.1, 0.6}) CHECK(F(t) == Approx(R(t)));
  const double r = 0.4;
  auto I = reflect(indicator_below(r));
  CHECK(atom_mass(I.nu(), -r) == Approx(1 / r));
  CHECK(I(-0.5) == 0.0);
  CHECK(I(-r, Side::right) == 1.0);
  CHECK(I(-r, Side::left) == 0.0);
  CHECK(I(0.9) == 1.0);
  auto back = reflect(I);
  CHECK(back(0.5) == 0.0);
  CHECK(atom_mass(back.nu(), r) == Approx(1 / r));
}

TEST_CASE("smooth profiles") {
  auto P = from_smooth([](double t) { return 1 - t * t; }, [](double t) { return -2 * t; });
  for (double t : {-0.5, 0.0, 1e-9, 0.7}) CHECK(P.nu().density_at(t) == Approx(2.0));
  auto R = semicircle();
  for (double t : {-0.5, 0.0, 0.7}) CHECK(R.nu().density_at(t) == Approx(1 / std::sqrt(one_minus_sq(t))));
  auto C = from_smooth([](double) { return 3.0; }, [](double) { return 0.0; });
  CHECK(C.nu().density_at(0.4) == 0.0);
  CHECK_THROWS_AS(from_smooth([](double t) { return -std::abs(t); },
                              [](double t) { return t > 0 ? -1.0 : 1.0; }),
                  Error);
}

TEST_CASE("fundamental theorem round trip on random data") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const double c0 = 1 + U(rng) * 0.5, c1 = U(rng), c2 = U(rng), xa = 0.5 * U(rng), ma = U(rng);
    Fn rho = [=](double s) { return c0 + c1 * s + c2 * std::cos(3 * s); };
    ZonalMeasure nu(-1, 1, {{xa == 0 ? 0.1 : xa, ma}}, {{-1, 1, rho}});
    BV0Function R(2.0, nu);
    // recover the density by differentiating R on smooth stretches
    for (double t : {-0.83, -0.61, 0.47, 0.91}) {
      if (std::abs(t - xa) < 0.05) continue;
      const double h = 1e-4;
      const double d = (R(t + h) - R(t - h)) / (2 * h);
      CHECK(-d / t == Approx(rho(t)).epsilon(1e-7));
    }
    CHECK(R(0.0, Side::left) == 2.0);
    CHECK(R(1e-12) == Approx(2.0).epsilon(1e-11));
    CHECK(R(-1e-12) == Approx(2.0).epsilon(1e-11));
  }
}

TEST_CASE("algebraic properties") {
  auto A = semicircle();
  auto B = from_smooth([](double t) { return 2 - t * t; }, [](double t) { return -2 * t; });
  auto C = indicator_below(0.6);
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> U(-0.99, 0.99);
  auto ab = product(A, B), ba = product(B, A);
  auto left = product(product(A, B), C), right = product(A, product(B, C));
  for (int k = 0; k < 30; ++k) {
    const double t = U(rng);
    CHECK(ab(t) == Approx(ba(t)).epsilon(1e-13));
    CHECK(left(t) == Approx(right(t)).epsilon(1e-13));
    CHECK(left.nu().density_at(t) == Approx(right.nu().density_at(t)).epsilon(1e-12));
  }
  REQUIRE(left.nu().atoms().size() == right.nu().atoms().size());
  for (std::size_t k = 0; k < left.nu().atoms().size(); ++k) {
    CHECK(left.nu().atoms()[k].t == right.nu().atoms()[k].t);
    CHECK(left.nu().atoms()[k].mass == Approx(right.nu().atoms()[k].mass).epsilon(1e-13));
  }
  // monotone for non-negative nu
  auto P = product(A, C);
  double prev = P(0.0);
  for (double t = 0.01; t < 1.0; t += 0.01) {
    CHECK(P(t) <= prev + 1e-14);
    prev = P(t);
  }
  prev = P(0.0);
  for (double t = -0.01; t > -1.0; t -= 0.01) {
    CHECK(P(t) <= prev + 1e-14);
    prev = P(t);
  }
}

TEST_CASE("positivity interval") {
  auto ball = power(semicircle(), 3);
  auto I = positivity_interval(ball);
  CHECK(I.lo == -1.0);
  CHECK(I.hi == 1.0);
  auto cone = product(ball, indicator_below(0.4));
  auto J = positivity_interval(cone);
  CHECK(J.lo == -1.0);
  CHECK(J.hi == 0.4);
  auto disk = BV0Function::constant(1.0);
  CHECK(positivity_interval(disk).hi == 1.0);
}
