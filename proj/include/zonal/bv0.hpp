#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "zonal/measure.hpp"

namespace zonal {

// Which one-sided limit to take. `cross` is the outer limit: right of t for
// t >= 0, left of t for t < 0.
enum class Side { left, right, cross };

// Closed-form evaluator; called with Side::left or Side::right only.
using SidedFn = std::function<double(double, Side)>;

// A function of locally bounded variation given by R(0) and the measure nu with
// R(t+) - R(s+) = -int_(s,t] x nu(dx). Evaluation uses a closed form when one is
// attached and the integral relation otherwise.
class BV0Function {
 public:
  BV0Function();
  BV0Function(double base, ZonalMeasure nu, std::optional<double> limit_lo = std::nullopt,
              std::optional<double> limit_hi = std::nullopt);
  BV0Function(ZonalMeasure nu, SidedFn exact);

  static BV0Function constant(double c, double lo = -1.0, double hi = 1.0);

  double base() const { return base_; }
  const ZonalMeasure& nu() const { return nu_; }
  double lo() const { return nu_.lo(); }
  double hi() const { return nu_.hi(); }
  bool has_closed_form() const { return static_cast<bool>(exact_); }
  const SidedFn& closed_form() const { return exact_; }

  double eval(double t, Side side = Side::right) const;
  double operator()(double t, Side side = Side::right) const { return eval(t, side); }
  // Limits at the carrier ends, taken from inside.
  double limit_lo() const;
  double limit_hi() const;

  BV0Function scaled(double c) const;
  // Same function on the smaller carrier [a, b]; nu keeps only (a, b).
  BV0Function restricted(double a, double b) const;

 private:
  double ftc(double t, Side side) const;

  double base_ = 1.0;
  ZonalMeasure nu_;
  SidedFn exact_;
  std::shared_ptr<const TailIntegral> moment_;
  double limit_lo_ = 1.0, limit_hi_ = 1.0;
};

double eval(const BV0Function& R, double t, Side side);

BV0Function product(const BV0Function& R, const BV0Function& Q);
BV0Function reciprocal(const BV0Function& R, double floor = 1e-13);
BV0Function power(const BV0Function& R, int k);
// k-th root of a function with non-negative values.
BV0Function root(const BV0Function& P, int k);
BV0Function dilate(const BV0Function& R, double a_minus, double a_plus);
BV0Function reflect(const BV0Function& R);

struct SmoothOptions {
  double lo = -1.0, hi = 1.0;
  EndKind lo_kind = EndKind::singular;
  EndKind hi_kind = EndKind::singular;
  std::optional<double> second_derivative_at_zero;
};
BV0Function from_smooth(std::function<double(double)> R, std::function<double(double)> derivative,
                        SmoothOptions options = {});

struct PositivityInterval {
  double lo, hi;
};
// Largest interval around 0 on which R stays above eps (R assumed non-negative
// with non-negative nu). The ends are taken from the breakpoints of nu rather than
// located by bisection, so profiles decaying like a high power keep their end.
PositivityInterval positivity_interval(const BV0Function& R, double eps = 1e-13);

bool is_nonnegative(const ZonalMeasure& mu, double floor = -1e-10);

}  // namespace zonal
