#pragma once

#include <array>
#include <functional>
#include <vector>

namespace zonal::quad {

using Fn = std::function<double(double)>;

// Behaviour of an integrand at the end of the piece it lives on. Singular ends
// (algebraic blow-up or non-smooth power behaviour, e.g. (1 - t^2)^alpha) are
// resolved by geometric cells and an extrapolated tail.
enum class EndKind { regular, singular };

struct Tolerance {
  double rel = 1e-10;
  double abs = 1e-15;
};

struct PanelShape {
  double lo = -1.0;
  double hi = 1.0;
  EndKind lo_kind = EndKind::regular;
  EndKind hi_kind = EndKind::regular;
};

// Integral of f over [a, b], where [a, b] lies inside the piece described by shape.
double integrate(const Fn& f, const PanelShape& shape, double a, double b, Tolerance tol = {});

// Plain adaptive Gauss-Kronrod on [a, b].
double integrate(const Fn& f, double a, double b, Tolerance tol = {});

// Integral left over between a singular end and the closest geometric cell, as
// a power-law part plus a part linear in the relative distance r to the end.
struct Tail {
  double singular = 0.0;
  double exponent = 1.0;
  double regular = 0.0;
  double logarithmic = 0.0;  // coefficient of r log(1/r), from log-singular integrands
  double value() const { return singular + regular; }
  double at(double r) const;
};

// Running integrals of a fixed integrand over one piece, tabulated once so that
// queries cost a barycentric interpolation. Accuracy near singular ends is
// relative to the size of the remaining tail.
class CumulativeTable {
 public:
  static constexpr int kOrder = 12;
  // Refinement stops once this many cells exist (noisy integrands).
  static constexpr std::size_t kMaxCells = 4096;

  CumulativeTable() = default;
  CumulativeTable(const Fn& f, const PanelShape& shape, Tolerance tol = {});

  double lower(double t) const;  // integral over [lo, t]
  double upper(double t) const;  // integral over [t, hi]
  double total() const { return total_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  struct Cell {
    double lo, hi;
    std::array<double, kOrder + 1> F;  // running integral at Lobatto nodes
  };

  double local(const Cell& c, double t) const;
  void add_cell(const Fn& f, double a, double b, const Tolerance& tol, int depth);

  std::vector<Cell> cells_;
  std::vector<double> before_, after_;
  double lo_ = 0.0, hi_ = 0.0;
  Tail tail_lo_, tail_hi_;
  double total_ = 0.0;
};

}  // namespace zonal::quad
