#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "zonal/constants.hpp"
#include "zonal/error.hpp"
#include "zonal/solver.hpp"

using namespace zonal;
using doctest::Approx;

namespace {

double one_minus_sq(double t) { return (1 - t) * (1 + t); }

std::vector<BodyOfRevolution> six_bodies(int n) {
  return {catalog::ball(n, 1.3),          catalog::disk(n, 0.8),      catalog::cone(n, 0.4),
          catalog::cylinder(n, 1.0, 0.7), catalog::spheroid(n, 1.5, 0.6),
          catalog::with_segment(catalog::cone(n, -0.3), 0.5)};
}

void check_profile(const BodyOfRevolution& got, const BodyOfRevolution& want, double lo = -1, double hi = 1,
                   double tol = 1e-6) {
  for (int k = 1; k < 40; ++k) {
    const double t = lo + (hi - lo) * k / 40;
    CHECK(got.profile(t) == Approx(want.profile(t)).scale(1.0).epsilon(tol));
  }
}

}  // namespace

TEST_CASE("condition check examples") {
  for (int n = 3; n <= 5; ++n) {
    const int i = 1;
    auto balls = repeated(catalog::ball(n), n - 1 - i);
    auto mu = mixed_area_pushforward(catalog::ball(n), i, balls);
    auto rep = check_conditions(mu, balls, n, i);
    CHECK(rep.passed());
    CHECK(rep.failed_clause().empty());

    auto poles = ZonalMeasure(-1, 1, {{1.0, kappa(n - 1)}, {-1.0, kappa(n - 1)}}, {});
    auto bad = check_conditions(poles, balls, n, i);
    CHECK_FALSE(bad.endpoints.pass);
    CHECK(bad.failed_clause() == "iv");

    auto flat = check_conditions(ZonalMeasure::dirac(0.0, 2.0), balls, n, i);
    CHECK_FALSE(flat.not_equatorial.pass);
    CHECK(flat.failed_clause() == "ii");
  }
  auto lopsided = ZonalMeasure(-1, 1, {{0.5, 1.0}}, {});
  CHECK_THROWS_AS(check_conditions(lopsided, repeated(catalog::ball(4), 2), 4, 1), Error);
}

TEST_CASE("sign-flipped preimage fails (iii)") {
  const int n = 4, i = 1;
  auto balls = repeated(catalog::ball(n), n - 1 - i);
  auto good = check_conditions(mixed_area_pushforward(catalog::ball(n), i, balls), balls, n, i);
  REQUIRE(good.passed());
  std::vector<DensityPiece> flipped;
  for (const auto& p : good.sigma.pieces()) {
    Fn f = p.f;
    flipped.push_back({p.lo, p.hi, [f](double t) { return (std::abs(t) > 0.2 && std::abs(t) < 0.3) ? -f(t) : f(t); },
                       p.lo_kind, p.hi_kind});
  }
  ZonalMeasure sigma(-1, 1, good.sigma.atoms(), flipped);
  auto mu = t_hat_adjoint(balls, sigma);
  REQUIRE(mu.min_sample() >= 0.0);
  auto bad = check_conditions(mu, balls, n, i);
  CHECK_FALSE(bad.transformed.pass);
  CHECK(bad.failed_clause() == "iii");
  CHECK(bad.transformed.margin < 0.0);
  CHECK_FALSE(solve(mu, balls, n, i).body);

  auto negative = mixed_area_pushforward(catalog::ball(n), i, balls).scaled(-1.0);
  CHECK_THROWS_AS(check_conditions(negative, balls, n, i), Error);
}

TEST_CASE("disk solver examples") {
  auto sigma = ZonalMeasure::with_density([](double t) { return M_PI / std::sqrt(one_minus_sq(t)); }, -1, 1,
                                          EndKind::singular, EndKind::singular);
  auto K = solve_disk(sigma, 3, 1);
  check_profile(K, catalog::ball(3), -0.999, 0.999, 1e-9);
  CHECK(K.segment == 0.0);

  for (int n = 3; n <= 5; ++n) {
    for (int i = 1; i < n; ++i) {
      const double k = kappa(n - 1);
      auto D = solve_disk(ZonalMeasure(-1, 1, {{1.0, k}, {-1.0, k}}, {}), n, i);
      CHECK(D.profile(0.3) == Approx(1.0));
      CHECK(D.profile.limit_hi() == Approx(1.0));
      CHECK(D.segment == 0.0);
      auto C = solve_disk(ZonalMeasure(-1, 1, {{1.0, k}, {-1.0, k}, {0.0, i * k * 0.6}}, {}), n, i);
      CHECK(C.segment == Approx(0.6));
      CHECK(C.waist() == Approx(1.0));
    }
  }
  CHECK_THROWS_AS(solve_disk(ZonalMeasure::dirac(0.0, 1.0), 3, 2), Error);
  CHECK_THROWS_AS(solve_disk(ZonalMeasure(-1, 1, {{1.0, 1.0}, {-1.0, -1.0}}, {}), 3, 1), Error);
}

TEST_CASE("solve examples") {
  for (int n = 3; n <= 5; ++n) {
    for (int i : {1, n - 2}) {
      auto balls = repeated(catalog::ball(n), n - 1 - i);
      auto rep = solve(mixed_area_pushforward(catalog::ball(n), i, balls), balls, n, i);
      REQUIRE(rep.body);
      INFO("n=" << n << " i=" << i);
      CHECK(rep.residual <= 1e-6);
      check_profile(*rep.body, catalog::ball(n), -0.999, 0.999);
      CHECK(rep.uniqueness == Uniqueness::unique_up_to_translation);
    }
    auto disks = repeated(catalog::disk(n), n - 2);
    auto cyl = catalog::cylinder(n, 1.0, 1.0);
    auto rep = solve(mixed_area_pushforward(cyl, 1, disks), disks, n, 1);
    REQUIRE(rep.body);
    CHECK(rep.body->segment == Approx(1.0).epsilon(1e-9));
    CHECK(rep.degenerate);
    CHECK(rep.residual <= 1e-6);

    const int i = 1;
    auto cones = repeated(catalog::cone(n, 0.5), n - 1 - i);
    auto crep = solve(mixed_area_pushforward(catalog::ball(n), i, cones), cones, n, i);
    REQUIRE(crep.body);
    CHECK(crep.uniqueness == Uniqueness::non_unique_patchable);
    CHECK(crep.residual <= 1e-6);
    check_profile(*crep.body, catalog::ball(n), -0.999, 0.499);
  }
}

TEST_CASE("round trip over the catalog") {
  for (int n = 3; n <= 5; ++n) {
    for (int i : {1, n - 2}) {
      for (const auto& ref : {catalog::ball(n), catalog::spheroid(n, 0.9, 1.2)}) {
        auto family = repeated(ref, n - 1 - i);
        for (const auto& K : six_bodies(n)) {
          INFO(K.name << " n=" << n << " i=" << i << " ref=" << ref.name);
          auto rep = solve(mixed_area_pushforward(K, i, family), family, n, i);
          REQUIRE(rep.body);
          CHECK(rep.residual <= 1e-6);
          CHECK(rep.body->segment == Approx(K.segment).scale(1.0).epsilon(1e-8));
        }
      }
    }
  }
  for (int n = 3; n <= 5; ++n) {
    auto balls = repeated(catalog::ball(n), n - 2);
    auto cyl = catalog::cylinder(n, 0.8, 0.6);
    auto rep = solve(mixed_area_pushforward(cyl, 1, balls), balls, n, 1);
    REQUIRE(rep.body);
    check_profile(*rep.body, cyl);
  }
}

TEST_CASE("centering and pole consistency") {
  const int n = 4;
  auto sigma = disk_mixed_pushforward(catalog::spheroid(n, 1.2, 0.7), 2);
  auto base = pole_values(sigma, n);
  CHECK(base.north == Approx(base.south).epsilon(1e-10));
  for (double eps : {1e-3, 1e-2, -5e-3}) {
    auto shifted = sigma.with_atom(1.0, eps);
    auto pv = pole_values(shifted, n);
    CHECK(pv.north - pv.south == Approx(eps / kappa(n - 1)).epsilon(1e-8));
    CHECK(moment(shifted, MomentKind::first) == Approx(eps).epsilon(1e-8));
  }
}

TEST_CASE("scaling equivariance") {
  for (int n = 3; n <= 5; ++n) {
    const int i = n - 2;
    auto family = repeated(catalog::ball(n), n - 1 - i);
    auto K = catalog::spheroid(n, 1.1, 0.7);
    auto mu = mixed_area_pushforward(K, i, family);
    auto one = solve(mu, family, n, i);
    for (double lambda : {0.5, 2.0}) {
      auto scaled = solve(mu.scaled(std::pow(lambda, i)), family, n, i);
      REQUIRE(scaled.body);
      for (double t : {-0.9, -0.2, 0.4, 0.8})
        CHECK(scaled.body->profile(t) == Approx(lambda * one.body->profile(t)).epsilon(1e-8));
    }
  }
}

TEST_CASE("classical display for ball references") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  int accepted = 0, rejected = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 3, i = 1, k = n - 1 - i;
    const double c2 = coef(rng), c4 = coef(rng);
    auto q = [c2, c4](double t) { return std::exp(c2 * t * t + c4 * t * t * t * t); };
    const double w = omega(n - 1);
    auto mu = ZonalMeasure::with_density(
        [q, w, n](double t) { return w * std::pow(one_minus_sq(t), 0.5 * (n - 3)) * q(t); }, -1, 1,
        EndKind::singular, EndKind::singular);
    auto balls = repeated(catalog::ball(n), k);
    bool classical = true;
    bool sampled_ok = true;
    auto rep = check_conditions(mu, balls, n, i);
    std::vector<double> grid;
    for (int m = 0; m < 50; ++m) grid.push_back(-0.98 + 1.96 * (m + 0.5) / 50);
    for (int m = 6; m <= 20; ++m) {
      grid.push_back(1.0 - std::ldexp(1.0, -m));
      grid.push_back(-1.0 + std::ldexp(1.0, -m));
    }
    for (double t : grid) {
      const double tail = quad::integrate(
          [q, n](double s) { return q(s) * std::abs(s) * std::pow(one_minus_sq(s), 0.5 * (n - 3)); },
          {std::abs(t), 1.0, EndKind::regular, EndKind::singular}, std::abs(t), 1.0);
      const double display = std::pow(one_minus_sq(t), 0.5 * (n - 1)) * q(t) - k * tail;
      if (display <= 0) classical = false;
      const double rescaled = rep.sigma.density_at(t) * std::pow(one_minus_sq(t), 0.5 * k + 1) / w;
      if (std::abs(rescaled - display) > 1e-8 * (1 + std::abs(display))) sampled_ok = false;
    }
    INFO("trial " << trial);
    CHECK(sampled_ok);
    CHECK(rep.transformed.pass == classical);
    (classical ? accepted : rejected)++;
  }
  CHECK(accepted > 0);
  CHECK(rejected > 0);
}
