#pragma once

#include <memory>
#include <vector>

#include "zonal/quadrature.hpp"

namespace zonal {

using quad::EndKind;
using quad::Fn;

struct Atom {
  double t;
  double mass;
};

struct DensityPiece {
  double lo, hi;
  Fn f;
  EndKind lo_kind = EndKind::regular;
  EndKind hi_kind = EndKind::regular;

  quad::PanelShape shape() const { return {lo, hi, lo_kind, hi_kind}; }
};

struct Interval {
  double lo, hi;
  bool lo_closed = true;
  bool hi_closed = true;

  bool contains(double t) const;
  static Interval closed(double a, double b) { return {a, b, true, true}; }
  static Interval open(double a, double b) { return {a, b, false, false}; }
};

enum class Pole { plus, minus };
enum class MomentKind { total, first, positive_part_first };

// Finite signed measure on a closed carrier inside [-1, 1]: sorted atoms plus a
// piecewise density. Pieces may leave gaps, where the density is zero.
class ZonalMeasure {
 public:
  ZonalMeasure();
  ZonalMeasure(double lo, double hi, std::vector<Atom> atoms, std::vector<DensityPiece> pieces,
               bool lo_integrable = true, bool hi_integrable = true);

  static ZonalMeasure zero(double lo = -1.0, double hi = 1.0);
  static ZonalMeasure dirac(double t, double mass = 1.0, double lo = -1.0, double hi = 1.0);
  static ZonalMeasure with_density(Fn f, double lo = -1.0, double hi = 1.0,
                                   EndKind lo_kind = EndKind::regular, EndKind hi_kind = EndKind::regular);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }
  bool lo_integrable() const { return lo_integrable_; }
  bool hi_integrable() const { return hi_integrable_; }

  double atom_at(double t) const;
  double density_at(double t) const;
  // Sorted piece ends and atom locations.
  std::vector<double> breakpoints() const;

  double integrate(const Fn& f, quad::Tolerance tol = {}) const;
  double integrate(const Fn& f, const Interval& J, quad::Tolerance tol = {}) const;
  // Density part only, over [a, b].
  double density_integral(const Fn& f, double a, double b, quad::Tolerance tol = {}) const;

  ZonalMeasure restricted(const Interval& J) const;
  ZonalMeasure scaled(double c) const;
  ZonalMeasure mirrored() const;
  ZonalMeasure with_atom(double t, double mass) const;
  ZonalMeasure with_carrier(double lo, double hi) const;
  ZonalMeasure plus(const ZonalMeasure& other) const;

  double total_variation(quad::Tolerance tol = {}) const;
  // Smallest sampled value of atoms and density, for sign checks.
  double min_sample(int per_piece = 96) const;
  bool is_zero() const { return atoms_.empty() && pieces_.empty(); }

 private:
  double lo_ = -1.0, hi_ = 1.0;
  std::vector<Atom> atoms_;
  std::vector<DensityPiece> pieces_;
  bool lo_integrable_ = true, hi_integrable_ = true;
};

ZonalMeasure operator+(const ZonalMeasure& a, const ZonalMeasure& b);

double integrate(const Fn& f, const ZonalMeasure& mu, double tol = 1e-10);
double cap_mass(const ZonalMeasure& mu, double t, Pole pole);
double moment(const ZonalMeasure& mu, MomentKind kind);
ZonalMeasure restrict(const ZonalMeasure& mu, const Interval& J);

// Integrals of weight * mu toward either carrier end, tabulated for repeated
// queries. Values stay relatively accurate close to the ends.
class TailIntegral {
 public:
  TailIntegral() = default;
  TailIntegral(const ZonalMeasure& mu, const Fn& weight, quad::Tolerance tol = {});

  double upper(double t, bool closed) const;  // over [t, hi] or (t, hi]
  double lower(double t, bool closed) const;  // over [lo, t] or [lo, t)
  double total() const { return total_; }

 private:
  std::vector<double> atom_t_, atom_w_, atom_prefix_, atom_suffix_;
  std::vector<quad::CumulativeTable> tables_;
  std::vector<double> piece_before_, piece_after_;
  double total_ = 0.0;
};

// Helpers for building measures over a common refinement of several piece lists.
namespace pieces {

// Sorted unique cut points inside [lo, hi], always including lo and hi.
std::vector<double> cuts(double lo, double hi, const std::vector<std::vector<double>>& sources);

// The piece of ps covering [u, v], or nullptr.
const DensityPiece* covering(const std::vector<DensityPiece>& ps, double u, double v);

// Kind of p at x when x is one of its ends, regular otherwise.
EndKind end_kind(const DensityPiece* p, double x);

EndKind worst(EndKind a, EndKind b);

}  // namespace pieces

}  // namespace zonal
