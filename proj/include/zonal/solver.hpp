#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zonal/body.hpp"
#include "zonal/transform.hpp"

namespace zonal {

struct ClauseVerdict {
  bool pass = true;
  double margin = 0.0;
  std::string detail;
};

enum class Uniqueness { unique_up_to_translation, non_unique_patchable };
const char* to_string(Uniqueness u);

struct SolveOptions {
  double centering = 1e-9;     // relative to the total mass
  double nonnegative = 1e-10;  // relative floor for sampled values
  double pole_consistency = 1e-8;
};

struct SolveReport {
  ClauseVerdict support;             // (i) support inside [a-, a+]
  ClauseVerdict not_equatorial;      // (ii) not concentrated at 0
  ClauseVerdict transformed;         // (iii) preimage non-negative and finite
  ClauseVerdict endpoints;           // (iv) endpoint limits exist
  ClauseVerdict equator_inequality;  // (v)
  double a_minus = -1.0, a_plus = 1.0;
  ZonalMeasure sigma;
  std::optional<BodyOfRevolution> body;
  double residual = -1.0;  // negative until a body is verified
  Uniqueness uniqueness = Uniqueness::unique_up_to_translation;
  bool degenerate = false;  // solution is a disk, possibly plus a segment

  bool passed() const;
  // Roman numeral of the first failing clause, checked in the order
  // i, ii, iv, iii, v (existence of the preimage before its sign), or empty.
  std::string failed_clause() const;
};

SolveReport check_conditions(const ZonalMeasure& mu, const ReferenceFamily& family, int n, int i,
                             SolveOptions options = {});

struct PoleValues {
  double north, south;
};
// Value at 0 of R_K^i computed from either pole; they agree iff sigma is centered.
PoleValues pole_values(const ZonalMeasure& sigma, int n);

// Body K with disk_mixed_pushforward(K, i) = sigma.
BodyOfRevolution solve_disk(const ZonalMeasure& sigma, int n, int i, SolveOptions options = {});

SolveReport solve(const ZonalMeasure& mu, const ReferenceFamily& family, int n, int i, SolveOptions options = {});

// Chebyshev polynomials T_0..T_16 and smoothed caps.
std::vector<Fn> residual_family();
// Largest discrepancy over the residual family, relative to max(1, total mass of a).
double residual(const ZonalMeasure& a, const ZonalMeasure& b);

}  // namespace zonal
