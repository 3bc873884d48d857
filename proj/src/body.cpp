#include "zonal/body.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>

#include "zonal/constants.hpp"
#include "zonal/error.hpp"

namespace zonal {

namespace {

double one_minus_sq(double t) { return (1.0 - t) * (1.0 + t); }

double factorial(int m) { return std::tgamma(m + 1.0); }

}  // namespace

std::function<double(double, Side)> boundary_height(const BV0Function& R, double z0) {
  auto tail = std::make_shared<TailIntegral>(R.nu(), [](double s) { return std::sqrt(one_minus_sq(s)); });
  const double up = tail->upper(0.0, false);
  const double down = tail->lower(0.0, false);
  return [tail, up, down, z0](double t, Side side) {
    if (side == Side::cross) side = t >= 0.0 ? Side::right : Side::left;
    if (t > 0.0) return z0 + up - tail->upper(t, side == Side::left);
    if (t < 0.0) return z0 - (down - tail->lower(t, side == Side::right));
    return z0;
  };
}

SupportProfile support_from_profile(const BV0Function& R, double segment, double z0) {
  auto z = boundary_height(R, z0);
  SupportProfile h;
  h.value = [R, z, segment](double t) {
    return t * z(t, Side::cross) + std::sqrt(one_minus_sq(t)) * R(t, Side::cross) + segment * std::max(t, 0.0);
  };
  h.slope = [R, z, segment](double t, Side side) {
    if (side == Side::cross) side = t >= 0.0 ? Side::right : Side::left;
    const bool on_segment = side == Side::right ? t >= 0.0 : t > 0.0;
    return z(t, side) - t * R(t, side) / std::sqrt(one_minus_sq(t)) + (on_segment ? segment : 0.0);
  };
  h.curvature = [R](double t) {
    const double w = one_minus_sq(t), root = std::sqrt(w);
    const double first = R(t) / root;
    const double second = root * R.nu().density_at(t);
    return (second - first) / w;
  };
  for (const auto& a : R.nu().atoms())
    if (a.mass != 0.0) h.kinks.push_back(a.t);
  return h;
}

BV0Function profile_from_support(const SupportProfile& h, ProfileFitOptions options) {
  if (!h.value || !h.slope) throw Error(ErrorKind::invalid_argument, "support profile needs value and slope");
  std::vector<double> kinks;
  for (double x : h.kinks)
    if (x > -1.0 && x < 1.0 && x != 0.0) kinks.push_back(x);
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());

  auto R = [h](double t, Side side) { return std::sqrt(one_minus_sq(t)) * (h.value(t) - t * h.slope(t, side)); };
  std::function<double(double)> curvature = h.curvature;
  if (!curvature) {
    curvature = [h](double t) {
      const double step = 1e-5 * std::max(1e-3, one_minus_sq(t));
      return (h.slope(t + step, Side::right) - h.slope(t - step, Side::right)) / (2 * step);
    };
  }
  Fn density = [h, curvature](double t) {
    const double w = one_minus_sq(t);
    const double first = h.value(t) - t * h.slope(t, Side::right);
    return (w * curvature(t) + first) / std::sqrt(w);
  };
  std::vector<double> cuts{-1.0};
  cuts.insert(cuts.end(), kinks.begin(), kinks.end());
  cuts.push_back(1.0);
  std::vector<DensityPiece> ps;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    ps.push_back({cuts[k], cuts[k + 1], density, k == 0 ? EndKind::singular : EndKind::regular,
                  k + 2 == cuts.size() ? EndKind::singular : EndKind::regular});
  }
  std::vector<Atom> atoms;
  for (double x : kinks) atoms.push_back({x, (R(x, Side::left) - R(x, Side::right)) / x});
  ZonalMeasure nu(-1.0, 1.0, atoms, ps);

  double scale = 1.0;
  for (const auto& a : nu.atoms()) scale = std::max(scale, std::abs(a.mass));
  const double worst = nu.min_sample();
  if (worst < -options.tolerance * scale) {
    throw Error(ErrorKind::not_convex, "fitted nu has negative part " + std::to_string(worst));
  }
  return BV0Function(h.value(0.0), std::move(nu));
}

double segment_length_from_support(const SupportProfile& h) {
  return h.slope(0.0, Side::right) - h.slope(0.0, Side::left);
}

BodyOfRevolution make_body(int n, BV0Function profile, double segment, double z0, std::string name) {
  if (n < 3) throw Error(ErrorKind::dimension_mismatch, "ambient dimension must be at least 3");
  if (segment < 0.0) throw Error(ErrorKind::invalid_argument, "segment length must be non-negative");
  BodyOfRevolution K;
  K.n = n;
  K.support = support_from_profile(profile, segment, z0);
  K.profile = std::move(profile);
  K.segment = segment;
  K.z0 = z0;
  K.name = std::move(name);
  return K;
}

namespace catalog {

namespace {

BodyOfRevolution assemble(int n, BV0Function profile, double segment, SupportProfile support, std::string name) {
  if (n < 3) throw Error(ErrorKind::dimension_mismatch, "ambient dimension must be at least 3");
  BodyOfRevolution K;
  K.n = n;
  K.profile = std::move(profile);
  K.segment = segment;
  K.support = std::move(support);
  K.name = std::move(name);
  return K;
}

SupportProfile disk_support(double radius) {
  SupportProfile h;
  h.value = [radius](double t) { return radius * std::sqrt(one_minus_sq(t)); };
  h.slope = [radius](double t, Side) { return -radius * t / std::sqrt(one_minus_sq(t)); };
  h.curvature = [radius](double t) { return -radius * std::pow(one_minus_sq(t), -1.5); };
  return h;
}

}  // namespace

BodyOfRevolution ball(int n, double radius) {
  auto nu = ZonalMeasure::with_density([radius](double t) { return radius / std::sqrt(one_minus_sq(t)); }, -1.0, 1.0,
                                       EndKind::singular, EndKind::singular);
  BV0Function R(std::move(nu), [radius](double t, Side) { return radius * std::sqrt(one_minus_sq(t)); });
  SupportProfile h;
  h.value = [radius](double) { return radius; };
  h.slope = [](double, Side) { return 0.0; };
  h.curvature = [](double) { return 0.0; };
  return assemble(n, std::move(R), 0.0, std::move(h), "ball");
}

BodyOfRevolution disk(int n, double radius) {
  return assemble(n, BV0Function::constant(radius), 0.0, disk_support(radius), "disk");
}

BodyOfRevolution cone(int n, double s) {
  if (!(s != 0.0 && std::abs(s) < 1.0)) throw Error(ErrorKind::invalid_argument, "cone parameter must lie in (-1, 0) or (0, 1)");
  const double apex = std::sqrt(one_minus_sq(s)) / s;
  BV0Function R(ZonalMeasure::dirac(s, 1.0 / std::abs(s)), [s](double t, Side side) {
    const bool inside = s > 0.0 ? (t < s || (t == s && side == Side::left)) : (t > s || (t == s && side == Side::right));
    return inside ? 1.0 : 0.0;
  });
  const auto disk = disk_support(1.0);
  auto on_disk = [s](double t, Side side) {
    if (t == s) return s > 0.0 ? side == Side::left : side == Side::right;
    return s > 0.0 ? t < s : t > s;
  };
  SupportProfile h;
  h.value = [s, apex, disk](double t) { return (s > 0.0 ? t <= s : t >= s) ? disk.value(t) : apex * t; };
  h.slope = [apex, disk, on_disk](double t, Side side) { return on_disk(t, side) ? disk.slope(t, side) : apex; };
  h.curvature = [s, disk](double t) { return (s > 0.0 ? t < s : t > s) ? disk.curvature(t) : 0.0; };
  h.kinks = {s};
  return assemble(n, std::move(R), 0.0, std::move(h), "cone");
}

BodyOfRevolution cylinder(int n, double radius, double length) {
  return with_segment(disk(n, radius), length);
}

BodyOfRevolution spheroid(int n, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorKind::invalid_argument, "spheroid semi-axes must be positive");
  const double c = a * a - b * b;
  auto hbar = [b, c](double t) { return std::sqrt(b * b + c * t * t); };
  auto nu = ZonalMeasure::with_density(
      [a, b, hbar](double t) { return a * a * b * b / (std::sqrt(one_minus_sq(t)) * std::pow(hbar(t), 3)); }, -1.0,
      1.0, EndKind::singular, EndKind::singular);
  BV0Function R(std::move(nu), [b, hbar](double t, Side) { return b * b * std::sqrt(one_minus_sq(t)) / hbar(t); });
  SupportProfile h;
  h.value = hbar;
  h.slope = [c, hbar](double t, Side) { return c * t / hbar(t); };
  h.curvature = [b, c, hbar](double t) { return c * b * b / std::pow(hbar(t), 3); };
  return assemble(n, std::move(R), 0.0, std::move(h), "spheroid");
}

BodyOfRevolution segment(int n, double length) {
  SupportProfile h;
  h.value = [length](double t) { return length * std::max(t, 0.0); };
  h.slope = [length](double t, Side side) { return (side == Side::right ? t >= 0.0 : t > 0.0) ? length : 0.0; };
  h.curvature = [](double) { return 0.0; };
  auto K = assemble(n, BV0Function::constant(0.0), length, std::move(h), "segment");
  K.is_segment = true;
  return K;
}

BodyOfRevolution with_segment(const BodyOfRevolution& K, double length) {
  if (length < 0.0) throw Error(ErrorKind::invalid_argument, "segment length must be non-negative");
  BodyOfRevolution L = K;
  L.segment += length;
  const SupportProfile h = K.support;
  L.support.value = [h, length](double t) { return h.value(t) + length * std::max(t, 0.0); };
  L.support.slope = [h, length](double t, Side side) {
    if (side == Side::cross) side = t >= 0.0 ? Side::right : Side::left;
    return h.slope(t, side) + ((side == Side::right ? t >= 0.0 : t > 0.0) ? length : 0.0);
  };
  L.name = K.name + "+segment";
  return L;
}

BodyOfRevolution scaled(const BodyOfRevolution& K, double factor) {
  if (!(factor > 0.0)) throw Error(ErrorKind::invalid_argument, "scaling factor must be positive");
  BodyOfRevolution L = K;
  L.profile = K.profile.scaled(factor);
  L.segment *= factor;
  L.z0 *= factor;
  const SupportProfile h = K.support;
  L.support.value = [h, factor](double t) { return factor * h.value(t); };
  L.support.slope = [h, factor](double t, Side side) { return factor * h.slope(t, side); };
  if (h.curvature) L.support.curvature = [h, factor](double t) { return factor * h.curvature(t); };
  return L;
}

}  // namespace catalog

double ReferenceFamily::correction() const {
  const int j = size();
  return j * equator_weight / (2.0 * omega(j));
}

double equator_weight(const std::vector<const BodyOfRevolution*>& bodies) {
  const int j = static_cast<int>(bodies.size());
  if (j == 0) return 0.0;
  double sum = 0.0;
  for (int k = 0; k < j; ++k) {
    if (bodies[k]->segment == 0.0) continue;
    double prod = bodies[k]->segment;
    for (int m = 0; m < j; ++m)
      if (m != k) prod *= bodies[m]->waist();
    sum += prod;
  }
  return omega(j) / j * sum;
}

ReferenceFamily family_data(const std::vector<BodyOfRevolution>& bodies) {
  ReferenceFamily F;
  F.bodies = bodies;
  if (bodies.empty()) {
    F.profile = BV0Function::constant(1.0);
    F.pole_plus = F.pole_minus = 1.0;
    return F;
  }
  const int n = bodies.front().n;
  std::vector<const BodyOfRevolution*> ptrs;
  for (const auto& C : bodies) {
    if (C.is_segment) throw Error(ErrorKind::segment_not_allowed, "reference bodies must not be segments");
    if (C.n != n) throw Error(ErrorKind::dimension_mismatch, "reference bodies live in different dimensions");
    ptrs.push_back(&C);
  }
  F.profile = bodies.front().profile;
  for (std::size_t k = 1; k < bodies.size(); ++k) F.profile = product(F.profile, bodies[k].profile);
  F.equator_weight = equator_weight(ptrs);
  const auto I = positivity_interval(F.profile);
  F.a_minus = I.lo;
  F.a_plus = I.hi;
  F.pole_plus = F.profile.limit_hi();
  F.pole_minus = F.profile.limit_lo();
  return F;
}

ReferenceFamily repeated(const BodyOfRevolution& C, int count) {
  return family_data(std::vector<BodyOfRevolution>(static_cast<std::size_t>(count), C));
}

ZonalMeasure mixed_area_pushforward(const BodyOfRevolution& K, int i, const ReferenceFamily& family) {
  const int n = K.n;
  if (i < 1 || family.size() != n - 1 - i || (family.size() > 0 && family.dimension() != n)) {
    throw Error(ErrorKind::dimension_mismatch, "reference family must hold n-1-i bodies of dimension n");
  }
  if (K.is_segment) throw Error(ErrorKind::segment_not_allowed, "K must not be a segment");
  const BV0Function P = product(power(K.profile, i), family.profile);
  std::vector<const BodyOfRevolution*> tuple(static_cast<std::size_t>(i), &K);
  for (const auto& C : family.bodies) tuple.push_back(&C);
  const double k = kappa(n - 1);
  ZonalMeasure poles(-1.0, 1.0, {{0.0, equator_weight(tuple)}, {1.0, k * P.limit_hi()}, {-1.0, k * P.limit_lo()}}, {});
  return P.nu().scaled(k) + poles;
}

ZonalMeasure surface_area_pushforward(const BodyOfRevolution& K, int m) {
  if (m < 2) throw Error(ErrorKind::dimension_mismatch, "surface area measure needs dimension at least 2");
  const BV0Function P = power(K.profile, m - 1);
  const double w = omega(m - 1);
  ZonalMeasure atoms(-1.0, 1.0,
                     {{0.0, w * std::pow(K.waist(), m - 2) * K.segment},
                      {1.0, kappa(m - 1) * P.limit_hi()},
                      {-1.0, kappa(m - 1) * P.limit_lo()}},
                     {});
  return P.nu().scaled(w / (m - 1)) + atoms;
}

double kubota_factor(int n, int i) { return kappa(n - 1) / kappa(i); }

ZonalMeasure disk_mixed_pushforward(const BodyOfRevolution& K, int i, std::optional<double> kubota) {
  if (i < 1 || i > K.n - 1) throw Error(ErrorKind::dimension_mismatch, "degree out of range");
  if (K.is_segment) throw Error(ErrorKind::segment_not_allowed, "K must not be a segment");
  return surface_area_pushforward(K, i + 1).scaled(kubota.value_or(kubota_factor(K.n, i)));
}

double mixed_discriminant(const std::vector<std::vector<double>>& matrices, int m) {
  if (static_cast<int>(matrices.size()) != m) throw Error(ErrorKind::dimension_mismatch, "need m matrices");
  double sum = 0.0;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
    int count = 0;
    for (int j = 0; j < m; ++j) {
      if (!(mask & (1u << j))) continue;
      ++count;
      S += Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(matrices[j].data(), m, m);
    }
    sum += ((m - count) % 2 == 0 ? 1.0 : -1.0) * S.determinant();
  }
  return sum / factorial(m);
}

Fn smooth_density_oracle(const std::vector<BodyOfRevolution>& bodies) {
  const int m = static_cast<int>(bodies.size());
  if (m < 2) throw Error(ErrorKind::dimension_mismatch, "need n-1 >= 2 bodies");
  const int n = m + 1;
  for (const auto& C : bodies) {
    if (C.n != n) throw Error(ErrorKind::dimension_mismatch, "need exactly n-1 bodies in dimension n");
    if (!C.support.curvature || !C.support.kinks.empty() || C.segment != 0.0) {
      throw Error(ErrorKind::not_smooth, C.name + " has no twice differentiable support function");
    }
  }
  std::vector<SupportProfile> h;
  for (const auto& C : bodies) h.push_back(C.support);
  return [h, m, n](double t) {
    const double w = one_minus_sq(t);
    std::vector<std::vector<double>> hess;
    for (const auto& p : h) {
      const double first = p.value(t) - t * p.slope(t, Side::right);
      const double second = w * p.curvature(t) + first;
      std::vector<double> M(static_cast<std::size_t>(m * m), 0.0);
      for (int k = 0; k + 1 < m; ++k) M[k * m + k] = first;
      M[(m - 1) * m + (m - 1)] = second;
      hess.push_back(std::move(M));
    }
    return omega(n - 1) * std::pow(w, (n - 3) / 2.0) * mixed_discriminant(hess, m);
  };
}

}  // namespace zonal
