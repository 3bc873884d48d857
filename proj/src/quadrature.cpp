#include "zonal/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "zonal/error.hpp"

namespace zonal::quad {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
using GL10 = boost::math::quadrature::gauss<double, 10>;
using GL20 = boost::math::quadrature::gauss<double, 20>;

constexpr double kInf = std::numeric_limits<double>::infinity();
// Closest approach of geometric cells to a singular end.
constexpr double kMinCell = 1e-9;

double finite_value(const Fn& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) throw Error(ErrorKind::non_integrable, "integrand not finite at " + std::to_string(x));
  return y;
}

// Depth is capped: close to a singular end the abscissae carry rounding noise of
// relative size eps/w and no amount of bisection meets a relative tolerance there.
double gk(const Fn& f, double a, double b, const Tolerance& tol, unsigned depth = 12) {
  if (a == b) return 0.0;
  auto g = [&f](double x) { return finite_value(f, x); };
  double err = 0.0, l1 = 0.0;
  return GK::integrate(g, a, b, depth, tol.rel * 0.1, &err, &l1);
}

// Geometric cells start at a power of two so that every end +- 2^-k is exact;
// rounded cell boundaries bias the ratio the tail extrapolation relies on.
double pow2_below(double w) { return std::exp2(std::floor(std::log2(w))); }

// Cells are ordered toward the end and halve in width. Cell integrals are modelled
// as A q^k + B 2^-k; the ratio-1/2 component is eliminated by differencing. A
// difference that itself halves means (A + B k) 2^-k, a logarithmic end.
Tail geometric_tail(const std::vector<double>& cells, double end) {
  Tail tail;
  const std::size_t n = cells.size();
  if (n < 3) return tail;
  const double i3 = cells[n - 1], i2 = cells[n - 2], i1 = cells[n - 3];
  if (i3 != 0.0 && i2 != 0.0 && i1 != 0.0 && i3 / i2 >= 0.995 && i2 / i1 >= 0.995) {
    throw Error(ErrorKind::non_integrable, "cell integrals do not decay toward " + std::to_string(end));
  }
  {
    const double j_prev = i2 - 0.5 * i1, j_last = i3 - 0.5 * i2;
    const double scale = std::abs(i3) + std::abs(i2);
    if (std::abs(j_last) <= 1e-13 * scale) {
      tail.regular = i3;
      return tail;
    }
    const double q = j_prev != 0.0 ? j_last / j_prev : 0.0;
    if (q > 0.0 && q < 0.995 && std::abs(q - 0.5) > 1e-3) {
      // Singular component of the last cell and of everything beyond it.
      const double a_last = j_last * q / (q - 0.5);
      tail.singular = a_last * q / (1.0 - q);
      tail.exponent = -std::log2(q);
      tail.regular = i3 - a_last;
      return tail;
    }
    if (q > 0.0 && std::abs(q - 0.5) <= 1e-3) {
      tail.regular = i3 + 2.0 * j_last;
      tail.logarithmic = j_last / std::numbers::ln2;
      return tail;
    }
  }
  if (i3 == 0.0 || i2 == 0.0) return tail;
  const double q = i3 / i2;  // single power law
  if (q <= 0.0 || q >= 1.0) return tail;
  tail.singular = i3 * q / (1.0 - q);
  tail.exponent = -std::log2(q);
  return tail;
}

// Integral over [a, b] with cells accumulating geometrically at `end` (a or b).
// d is the distance from `end` to the nearest singular point beyond it.
double graded(const Fn& f, double a, double b, bool toward_b, double d, const Tolerance& tol) {
  const double end = toward_b ? b : a;
  double far = toward_b ? a : b;
  double w = pow2_below(0.5 * (b - a));
  const double stop = d == 0.0 ? kMinCell * std::max(1.0, std::abs(end)) : std::max(kMinCell, 1e-2 * d);
  std::vector<double> cells;
  double sum = 0.0;
  while (w > stop) {
    const double inner = toward_b ? end - w : end + w;
    const double v = toward_b ? gk(f, far, inner, tol, 5) : gk(f, inner, far, tol, 5);
    cells.push_back(v);
    sum += v;
    far = inner;
    w *= 0.5;
  }
  if (d > 0.0) return sum + (toward_b ? gk(f, far, end, tol) : gk(f, end, far, tol));
  return sum + geometric_tail(cells, end).value();
}

double distance_lo(const PanelShape& s, double a) {
  return s.lo_kind == EndKind::singular ? a - s.lo : kInf;
}
double distance_hi(const PanelShape& s, double b) {
  return s.hi_kind == EndKind::singular ? s.hi - b : kInf;
}

// Chebyshev-Lobatto nodes on [-1, 1] and their barycentric weights.
struct Lobatto {
  std::array<double, CumulativeTable::kOrder + 1> x, w;
  Lobatto() {
    const int p = CumulativeTable::kOrder;
    for (int k = 0; k <= p; ++k) {
      x[k] = -std::cos(std::numbers::pi * k / p);
      w[k] = (k % 2 == 0 ? 1.0 : -1.0) * ((k == 0 || k == p) ? 0.5 : 1.0);
    }
  }
};
const Lobatto& lobatto() {
  static const Lobatto nodes;
  return nodes;
}

}  // namespace

double Tail::at(double r) const {
  const double log_part = r > 0.0 ? logarithmic * r * std::log(1.0 / r) : 0.0;
  return singular * std::pow(r, exponent) + regular * r + log_part;
}

double integrate(const Fn& f, double a, double b, Tolerance tol) {
  if (b < a) return -integrate(f, b, a, tol);
  return gk(f, a, b, tol);
}

double integrate(const Fn& f, const PanelShape& shape, double a, double b, Tolerance tol) {
  if (b < a) return -integrate(f, shape, b, a, tol);
  if (a == b) return 0.0;
  const double len = b - a;
  const double da = distance_lo(shape, a);
  const double db = distance_hi(shape, b);
  const bool grade_a = da < 0.25 * len;
  const bool grade_b = db < 0.25 * len;
  if (!grade_a && !grade_b) return gk(f, a, b, tol);
  if (grade_a && grade_b) {
    const double mid = 0.5 * (a + b);
    return graded(f, a, mid, false, da, tol) + graded(f, mid, b, true, db, tol);
  }
  if (grade_a) return graded(f, a, b, false, da, tol);
  return graded(f, a, b, true, db, tol);
}

CumulativeTable::CumulativeTable(const Fn& f, const PanelShape& shape, Tolerance tol)
    : lo_(shape.lo), hi_(shape.hi) {
  if (!(hi_ > lo_)) return;
  const bool sing_lo = shape.lo_kind == EndKind::singular;
  const bool sing_hi = shape.hi_kind == EndKind::singular;
  const double len = hi_ - lo_;

  // Region boundaries: geometric clusters at singular ends, uniform in between.
  std::vector<double> lo_side, hi_side;
  double mid_lo = lo_, mid_hi = hi_;
  if (sing_lo) {
    const double stop = kMinCell * std::max(1.0, std::abs(lo_));
    double w = pow2_below(sing_hi ? 0.25 * len : 0.5 * len);
    mid_lo = lo_ + w;
    while (w > stop) {
      lo_side.push_back(lo_ + w);
      w *= 0.5;
    }
    lo_side.push_back(lo_ + w);
    std::reverse(lo_side.begin(), lo_side.end());
  }
  if (sing_hi) {
    const double stop = kMinCell * std::max(1.0, std::abs(hi_));
    double w = pow2_below(sing_lo ? 0.25 * len : 0.5 * len);
    mid_hi = hi_ - w;
    while (w > stop) {
      hi_side.push_back(hi_ - w);
      w *= 0.5;
    }
    hi_side.push_back(hi_ - w);
  }
  std::vector<double> bounds = lo_side;
  if (bounds.empty()) bounds.push_back(lo_);
  const int uniform = 4;
  for (int k = 1; k < uniform; ++k) bounds.push_back(mid_lo + (mid_hi - mid_lo) * k / uniform);
  if (hi_side.empty()) {
    bounds.push_back(hi_);
  } else {
    bounds.insert(bounds.end(), hi_side.begin(), hi_side.end());
  }

  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) add_cell(f, bounds[k], bounds[k + 1], tol, 0);

  // Integrals of the geometric clusters, ordered toward their ends, feed the tail estimate.
  auto region_integral = [this](double a, double b) {
    double s = 0.0;
    for (const auto& c : cells_)
      if (c.lo >= a && c.hi <= b) s += c.F.back();
    return s;
  };
  if (sing_lo && lo_side.size() >= 5) {
    tail_lo_ = geometric_tail({region_integral(lo_side[3], lo_side[4]), region_integral(lo_side[2], lo_side[3]),
                               region_integral(lo_side[1], lo_side[2]), region_integral(lo_side[0], lo_side[1])},
                              lo_);
  }
  if (sing_hi && hi_side.size() >= 5) {
    const std::size_t m = hi_side.size();
    tail_hi_ = geometric_tail({region_integral(hi_side[m - 5], hi_side[m - 4]),
                               region_integral(hi_side[m - 4], hi_side[m - 3]),
                               region_integral(hi_side[m - 3], hi_side[m - 2]),
                               region_integral(hi_side[m - 2], hi_side[m - 1])},
                              hi_);
  }

  const std::size_t nc = cells_.size();
  before_.assign(nc, 0.0);
  after_.assign(nc, 0.0);
  double run = tail_lo_.value();
  for (std::size_t k = 0; k < nc; ++k) {
    before_[k] = run;
    run += cells_[k].F.back();
  }
  run = tail_hi_.value();
  for (std::size_t k = nc; k-- > 0;) {
    after_[k] = run;
    run += cells_[k].F.back();
  }
  total_ = run + tail_lo_.value();
}

void CumulativeTable::add_cell(const Fn& f, double a, double b, const Tolerance& tol, int depth) {
  const auto& nodes = lobatto();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  Cell cell{a, b, {}};
  auto g = [&f](double x) { return finite_value(f, x); };
  cell.F[0] = 0.0;
  double prev = a;
  for (int k = 1; k <= kOrder; ++k) {
    const double x = mid + half * nodes.x[k];
    cell.F[k] = cell.F[k - 1] + GL10::integrate(g, prev, x);
    prev = x;
  }
  const double coarse = GL20::integrate(g, a, b);
  const double l1 = GL20::integrate([&g](double x) { return std::abs(g(x)); }, a, b);
  const double probe = a + 0.37 * (b - a);
  const double probe_exact = GL20::integrate(g, a, probe);
  // Abscissa rounding limits what is attainable in cells close to an end.
  const double noise = 100.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a)) / (b - a);
  const double limit = (tol.rel + noise) * l1 + tol.abs * 1e-3;
  const bool ok = std::abs(coarse - cell.F[kOrder]) <= limit && std::abs(local(cell, probe) - probe_exact) <= limit;
  if (ok || depth >= 30 || cells_.size() >= kMaxCells || (b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a))) {
    cells_.push_back(cell);
    return;
  }
  add_cell(f, a, mid, tol, depth + 1);
  add_cell(f, mid, b, tol, depth + 1);
}

double CumulativeTable::local(const Cell& c, double t) const {
  const auto& nodes = lobatto();
  const double half = 0.5 * (c.hi - c.lo);
  const double mid = 0.5 * (c.hi + c.lo);
  double num = 0.0, den = 0.0;
  for (int k = 0; k <= kOrder; ++k) {
    const double diff = t - (mid + half * nodes.x[k]);
    if (diff == 0.0) return c.F[k];
    const double q = nodes.w[k] / diff;
    num += q * c.F[k];
    den += q;
  }
  return num / den;
}

double CumulativeTable::lower(double t) const {
  if (cells_.empty() || t <= lo_) return 0.0;
  if (t >= hi_) return total_;
  if (t < cells_.front().lo) {
    const double r = (t - lo_) / (cells_.front().lo - lo_);
    return tail_lo_.at(r);
  }
  if (t > cells_.back().hi) return total_ - upper(t);
  auto it = std::upper_bound(cells_.begin(), cells_.end(), t, [](double x, const Cell& c) { return x < c.hi; });
  if (it == cells_.end()) --it;
  const std::size_t k = static_cast<std::size_t>(it - cells_.begin());
  return before_[k] + local(*it, t);
}

double CumulativeTable::upper(double t) const {
  if (cells_.empty() || t >= hi_) return 0.0;
  if (t <= lo_) return total_;
  if (t > cells_.back().hi) {
    const double r = (hi_ - t) / (hi_ - cells_.back().hi);
    return tail_hi_.at(r);
  }
  if (t < cells_.front().lo) return total_ - lower(t);
  auto it = std::upper_bound(cells_.begin(), cells_.end(), t, [](double x, const Cell& c) { return x < c.hi; });
  if (it == cells_.end()) --it;
  const std::size_t k = static_cast<std::size_t>(it - cells_.begin());
  return after_[k] + (it->F.back() - local(*it, t));
}

}  // namespace zonal::quad
