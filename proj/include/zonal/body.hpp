#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zonal/bv0.hpp"

namespace zonal {

// Zonal support function h(t) on [-1, 1] with one-sided slopes. Curvature is
// the second derivative away from kinks, when known.
struct SupportProfile {
  std::function<double(double)> value;
  std::function<double(double, Side)> slope;
  std::function<double(double)> curvature;
  std::vector<double> kinks;
};

struct BodyOfRevolution {
  int n = 3;
  BV0Function profile;
  double segment = 0.0;  // length of the vertical boundary segment
  double z0 = 0.0;       // height of the boundary point with horizontal normal
  SupportProfile support;
  std::string name;
  bool is_segment = false;

  double waist() const { return profile.base(); }
  double pole_radius(Pole pole) const { return pole == Pole::plus ? profile.limit_hi() : profile.limit_lo(); }
};

// Canonical construction from the profile; the support function is derived.
BodyOfRevolution make_body(int n, BV0Function profile, double segment = 0.0, double z0 = 0.0, std::string name = {});

// Height of the boundary point with normal parameter t, z0 + int_(0,t] sqrt(1-s^2) nu(ds).
std::function<double(double, Side)> boundary_height(const BV0Function& R, double z0);

SupportProfile support_from_profile(const BV0Function& R, double segment, double z0);

struct ProfileFitOptions {
  double tolerance = 1e-8;
};
// Profile from a support function: R(t) = sqrt(1-t^2) (h(t) - t h'(t+)), with
// nu read off from the curvature and atoms at the declared kinks.
BV0Function profile_from_support(const SupportProfile& h, ProfileFitOptions options = {});
// Jump of the slope at 0.
double segment_length_from_support(const SupportProfile& h);

namespace catalog {

BodyOfRevolution ball(int n, double radius = 1.0);
BodyOfRevolution disk(int n, double radius = 1.0);
// conv(D u {apex}) with the apex above the unit disk for s > 0 and below for s < 0;
// its profile is the indicator of (-1, s) resp. (s, 1).
BodyOfRevolution cone(int n, double s);
BodyOfRevolution cylinder(int n, double radius, double length);
// Vertical semi-axis a, horizontal semi-axis b.
BodyOfRevolution spheroid(int n, double a, double b);
BodyOfRevolution segment(int n, double length);
BodyOfRevolution with_segment(const BodyOfRevolution& K, double length);
BodyOfRevolution scaled(const BodyOfRevolution& K, double factor);

}  // namespace catalog

struct ReferenceFamily {
  std::vector<BodyOfRevolution> bodies;
  BV0Function profile;        // product of the profiles
  double equator_weight = 0;  // (omega_j / j) sum_k l_k prod_{m != k} R_m(0)
  double a_minus = -1.0, a_plus = 1.0;
  double pole_plus = 0.0, pole_minus = 0.0;

  int size() const { return static_cast<int>(bodies.size()); }
  int dimension() const { return bodies.empty() ? 0 : bodies.front().n; }
  // Coefficient of f(0)|t| in the corrected transform, (n-i-1) W / (2 omega_{n-i-1}).
  double correction() const;
};

ReferenceFamily family_data(const std::vector<BodyOfRevolution>& bodies);
ReferenceFamily repeated(const BodyOfRevolution& C, int count);

// Equator coefficient for an arbitrary tuple of bodies.
double equator_weight(const std::vector<const BodyOfRevolution*>& bodies);

// Pushforward of S(K[i], C) to [-1, 1].
ZonalMeasure mixed_area_pushforward(const BodyOfRevolution& K, int i, const ReferenceFamily& family);
// Pushforward of the surface area measure of K taken in dimension m.
ZonalMeasure surface_area_pushforward(const BodyOfRevolution& K, int m);
// Pushforward of S(K[i], D[n-1-i]) computed in dimension i + 1 and rescaled by
// kubota (default kappa_{n-1} / kappa_i).
ZonalMeasure disk_mixed_pushforward(const BodyOfRevolution& K, int i, std::optional<double> kubota = std::nullopt);
double kubota_factor(int n, int i);

// Density of the mixed area measure of n-1 smooth bodies from the Hessian
// eigenvalues h - t h' and (1-t^2) h'' + h - t h', polarized through a mixed
// discriminant.
Fn smooth_density_oracle(const std::vector<BodyOfRevolution>& bodies);

// Mixed discriminant of m symmetric m x m matrices given row-major.
double mixed_discriminant(const std::vector<std::vector<double>>& matrices, int m);

}  // namespace zonal
