#include "zonal/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zonal/error.hpp"

namespace zonal {

bool Interval::contains(double t) const {
  const bool above = lo_closed ? t >= lo : t > lo;
  const bool below = hi_closed ? t <= hi : t < hi;
  return above && below;
}

namespace pieces {

std::vector<double> cuts(double lo, double hi, const std::vector<std::vector<double>>& sources) {
  std::vector<double> out{lo, hi};
  for (const auto& src : sources)
    for (double x : src)
      if (x > lo && x < hi) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const DensityPiece* covering(const std::vector<DensityPiece>& ps, double u, double v) {
  for (const auto& p : ps)
    if (p.lo <= u && v <= p.hi) return &p;
  return nullptr;
}

EndKind end_kind(const DensityPiece* p, double x) {
  if (p == nullptr) return EndKind::regular;
  if (x == p->lo) return p->lo_kind;
  if (x == p->hi) return p->hi_kind;
  return EndKind::regular;
}

EndKind worst(EndKind a, EndKind b) {
  return (a == EndKind::singular || b == EndKind::singular) ? EndKind::singular : EndKind::regular;
}

}  // namespace pieces

namespace {

std::vector<Atom> normalized(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.t < b.t; });
  std::vector<Atom> out;
  for (const auto& a : atoms) {
    if (!out.empty() && out.back().t == a.t) {
      out.back().mass += a.mass;
    } else {
      out.push_back(a);
    }
  }
  std::erase_if(out, [](const Atom& a) { return a.mass == 0.0; });
  return out;
}

std::vector<double> piece_ends(const std::vector<DensityPiece>& ps) {
  std::vector<double> out;
  for (const auto& p : ps) {
    out.push_back(p.lo);
    out.push_back(p.hi);
  }
  return out;
}

}  // namespace

ZonalMeasure::ZonalMeasure() = default;

ZonalMeasure::ZonalMeasure(double lo, double hi, std::vector<Atom> atoms, std::vector<DensityPiece> ps,
                           bool lo_integrable, bool hi_integrable)
    : lo_(lo), hi_(hi), atoms_(normalized(std::move(atoms))), lo_integrable_(lo_integrable),
      hi_integrable_(hi_integrable) {
  if (!(lo >= -1.0 && hi <= 1.0 && lo <= hi)) throw Error(ErrorKind::invalid_argument, "carrier must lie in [-1, 1]");
  for (const auto& a : atoms_)
    if (a.t < lo_ || a.t > hi_) throw Error(ErrorKind::out_of_carrier, "atom outside carrier");
  for (auto& p : ps) {
    if (!p.f || !(p.hi > p.lo)) continue;
    if (p.lo < lo_ || p.hi > hi_) throw Error(ErrorKind::out_of_carrier, "density piece outside carrier");
    // Densities built from BV0 functions jump at atoms, so cells never straddle one.
    double start = p.lo;
    EndKind start_kind = p.lo_kind;
    for (const auto& a : atoms_) {
      if (a.t <= start || a.t >= p.hi) continue;
      pieces_.push_back({start, a.t, p.f, start_kind, EndKind::regular});
      start = a.t;
      start_kind = EndKind::regular;
    }
    pieces_.push_back({start, p.hi, std::move(p.f), start_kind, p.hi_kind});
  }
  std::sort(pieces_.begin(), pieces_.end(), [](const DensityPiece& a, const DensityPiece& b) { return a.lo < b.lo; });
  for (std::size_t k = 1; k < pieces_.size(); ++k)
    if (pieces_[k].lo < pieces_[k - 1].hi) throw Error(ErrorKind::invalid_argument, "overlapping density pieces");
}

ZonalMeasure ZonalMeasure::zero(double lo, double hi) { return ZonalMeasure(lo, hi, {}, {}); }

ZonalMeasure ZonalMeasure::dirac(double t, double mass, double lo, double hi) {
  return ZonalMeasure(lo, hi, {{t, mass}}, {});
}

ZonalMeasure ZonalMeasure::with_density(Fn f, double lo, double hi, EndKind lo_kind, EndKind hi_kind) {
  return ZonalMeasure(lo, hi, {}, {{lo, hi, std::move(f), lo_kind, hi_kind}});
}

double ZonalMeasure::atom_at(double t) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), t, [](const Atom& a, double x) { return a.t < x; });
  return (it != atoms_.end() && it->t == t) ? it->mass : 0.0;
}

double ZonalMeasure::density_at(double t) const {
  for (const auto& p : pieces_)
    if (t >= p.lo && t <= p.hi) return p.f(t);
  return 0.0;
}

std::vector<double> ZonalMeasure::breakpoints() const {
  std::vector<double> out = piece_ends(pieces_);
  for (const auto& a : atoms_) out.push_back(a.t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double ZonalMeasure::density_integral(const Fn& f, double a, double b, quad::Tolerance tol) const {
  double sum = 0.0;
  for (const auto& p : pieces_) {
    const double u = std::max(a, p.lo), v = std::min(b, p.hi);
    if (!(v > u)) continue;
    const Fn& g = p.f;
    sum += quad::integrate([&](double x) { return f(x) * g(x); }, p.shape(), u, v, tol);
  }
  return sum;
}

double ZonalMeasure::integrate(const Fn& f, quad::Tolerance tol) const {
  double sum = 0.0;
  for (const auto& a : atoms_) sum += f(a.t) * a.mass;
  return sum + density_integral(f, lo_, hi_, tol);
}

double ZonalMeasure::integrate(const Fn& f, const Interval& J, quad::Tolerance tol) const {
  double sum = 0.0;
  for (const auto& a : atoms_)
    if (J.contains(a.t)) sum += f(a.t) * a.mass;
  return sum + density_integral(f, J.lo, J.hi, tol);
}

ZonalMeasure ZonalMeasure::restricted(const Interval& J) const {
  const double lo = std::max(lo_, J.lo), hi = std::min(hi_, J.hi);
  if (!(hi >= lo)) return zero(lo_, hi_);
  std::vector<Atom> atoms;
  for (const auto& a : atoms_)
    if (J.contains(a.t)) atoms.push_back(a);
  std::vector<DensityPiece> ps;
  for (const auto& p : pieces_) {
    const double u = std::max(lo, p.lo), v = std::min(hi, p.hi);
    if (!(v > u)) continue;
    ps.push_back({u, v, p.f, u == p.lo ? p.lo_kind : EndKind::regular, v == p.hi ? p.hi_kind : EndKind::regular});
  }
  return ZonalMeasure(lo, hi, std::move(atoms), std::move(ps), lo == lo_ ? lo_integrable_ : true,
                      hi == hi_ ? hi_integrable_ : true);
}

ZonalMeasure ZonalMeasure::scaled(double c) const {
  if (c == 0.0) return zero(lo_, hi_);
  std::vector<Atom> atoms = atoms_;
  for (auto& a : atoms) a.mass *= c;
  std::vector<DensityPiece> ps = pieces_;
  for (auto& p : ps) {
    Fn g = p.f;
    p.f = [g, c](double x) { return c * g(x); };
  }
  return ZonalMeasure(lo_, hi_, std::move(atoms), std::move(ps), lo_integrable_, hi_integrable_);
}

ZonalMeasure ZonalMeasure::mirrored() const {
  std::vector<Atom> atoms;
  for (const auto& a : atoms_) atoms.push_back({-a.t, a.mass});
  std::vector<DensityPiece> ps;
  for (const auto& p : pieces_) {
    Fn g = p.f;
    ps.push_back({-p.hi, -p.lo, [g](double x) { return g(-x); }, p.hi_kind, p.lo_kind});
  }
  return ZonalMeasure(-hi_, -lo_, std::move(atoms), std::move(ps), hi_integrable_, lo_integrable_);
}

ZonalMeasure ZonalMeasure::with_atom(double t, double mass) const {
  std::vector<Atom> atoms = atoms_;
  atoms.push_back({t, mass});
  return ZonalMeasure(std::min(lo_, t), std::max(hi_, t), std::move(atoms), pieces_, lo_integrable_, hi_integrable_);
}

ZonalMeasure ZonalMeasure::with_carrier(double lo, double hi) const {
  return ZonalMeasure(lo, hi, atoms_, pieces_, lo == lo_ ? lo_integrable_ : true, hi == hi_ ? hi_integrable_ : true);
}

ZonalMeasure ZonalMeasure::plus(const ZonalMeasure& other) const {
  const double lo = std::min(lo_, other.lo_), hi = std::max(hi_, other.hi_);
  std::vector<Atom> atoms = atoms_;
  atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
  std::vector<DensityPiece> ps;
  if (other.pieces_.empty()) {
    ps = pieces_;
  } else if (pieces_.empty()) {
    ps = other.pieces_;
  } else {
    const auto cut = pieces::cuts(lo, hi, {piece_ends(pieces_), piece_ends(other.pieces_)});
    for (std::size_t k = 0; k + 1 < cut.size(); ++k) {
      const double u = cut[k], v = cut[k + 1];
      const DensityPiece* p = pieces::covering(pieces_, u, v);
      const DensityPiece* q = pieces::covering(other.pieces_, u, v);
      if (!p && !q) continue;
      const EndKind lk = pieces::worst(pieces::end_kind(p, u), pieces::end_kind(q, u));
      const EndKind hk = pieces::worst(pieces::end_kind(p, v), pieces::end_kind(q, v));
      if (p && q) {
        Fn f = p->f, g = q->f;
        ps.push_back({u, v, [f, g](double x) { return f(x) + g(x); }, lk, hk});
      } else {
        ps.push_back({u, v, p ? p->f : q->f, lk, hk});
      }
    }
  }
  auto flag = [](bool mine, bool theirs, bool at_mine, bool at_theirs) {
    return (at_mine ? mine : true) && (at_theirs ? theirs : true);
  };
  return ZonalMeasure(lo, hi, std::move(atoms), std::move(ps),
                      flag(lo_integrable_, other.lo_integrable_, lo == lo_, lo == other.lo_),
                      flag(hi_integrable_, other.hi_integrable_, hi == hi_, hi == other.hi_));
}

double ZonalMeasure::total_variation(quad::Tolerance tol) const {
  if (!lo_integrable_ || !hi_integrable_) throw Error(ErrorKind::non_integrable, "density not integrable up to the carrier ends");
  double sum = 0.0;
  for (const auto& a : atoms_) sum += std::abs(a.mass);
  for (const auto& p : pieces_) {
    const Fn& g = p.f;
    sum += quad::integrate([&g](double x) { return std::abs(g(x)); }, p.shape(), p.lo, p.hi, tol);
  }
  return sum;
}

double ZonalMeasure::min_sample(int per_piece) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& a : atoms_) m = std::min(m, a.mass);
  for (const auto& p : pieces_) {
    for (int k = 0; k < per_piece; ++k) {
      // Chebyshev points cluster samples toward the piece ends.
      const double x = 0.5 * (p.lo + p.hi) - 0.5 * (p.hi - p.lo) * std::cos(M_PI * (k + 0.5) / per_piece);
      m = std::min(m, p.f(x));
    }
  }
  return m;
}

ZonalMeasure operator+(const ZonalMeasure& a, const ZonalMeasure& b) { return a.plus(b); }

double integrate(const Fn& f, const ZonalMeasure& mu, double tol) { return mu.integrate(f, quad::Tolerance{tol, 1e-15}); }

double cap_mass(const ZonalMeasure& mu, double t, Pole pole) {
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorKind::invalid_argument, "cap parameter must lie in (0, 1]");
  auto one = [](double) { return 1.0; };
  if (pole == Pole::plus) return mu.integrate(one, Interval::closed(t, 1.0));
  return mu.integrate(one, Interval::closed(-1.0, -t));
}

double moment(const ZonalMeasure& mu, MomentKind kind) {
  switch (kind) {
    case MomentKind::total:
      return mu.integrate([](double) { return 1.0; });
    case MomentKind::first:
      return mu.integrate([](double s) { return s; });
    case MomentKind::positive_part_first:
      return mu.integrate([](double s) { return s; }, Interval{0.0, 1.0, false, true});
  }
  return 0.0;
}

ZonalMeasure restrict(const ZonalMeasure& mu, const Interval& J) { return mu.restricted(J); }

TailIntegral::TailIntegral(const ZonalMeasure& mu, const Fn& weight, quad::Tolerance tol) {
  for (const auto& a : mu.atoms()) {
    atom_t_.push_back(a.t);
    atom_w_.push_back(weight(a.t) * a.mass);
  }
  const std::size_t na = atom_t_.size();
  atom_prefix_.assign(na + 1, 0.0);
  atom_suffix_.assign(na + 1, 0.0);
  for (std::size_t k = 0; k < na; ++k) atom_prefix_[k + 1] = atom_prefix_[k] + atom_w_[k];
  for (std::size_t k = na; k-- > 0;) atom_suffix_[k] = atom_suffix_[k + 1] + atom_w_[k];

  for (const auto& p : mu.pieces()) {
    Fn f = p.f, w = weight;
    tables_.emplace_back([f, w](double x) { return w(x) * f(x); }, p.shape(), tol);
  }
  const std::size_t np = tables_.size();
  piece_before_.assign(np, 0.0);
  piece_after_.assign(np, 0.0);
  double run = 0.0;
  for (std::size_t k = 0; k < np; ++k) {
    piece_before_[k] = run;
    run += tables_[k].total();
  }
  run = 0.0;
  for (std::size_t k = np; k-- > 0;) {
    piece_after_[k] = run;
    run += tables_[k].total();
  }
  total_ = run + atom_prefix_[na];
}

double TailIntegral::upper(double t, bool closed) const {
  auto it = closed ? std::lower_bound(atom_t_.begin(), atom_t_.end(), t) : std::upper_bound(atom_t_.begin(), atom_t_.end(), t);
  double sum = atom_suffix_[static_cast<std::size_t>(it - atom_t_.begin())];
  for (std::size_t k = 0; k < tables_.size(); ++k) {
    if (tables_[k].hi() <= t) continue;
    if (tables_[k].lo() >= t) return sum + tables_[k].total() + piece_after_[k];
    return sum + tables_[k].upper(t) + piece_after_[k];
  }
  return sum;
}

double TailIntegral::lower(double t, bool closed) const {
  auto it = closed ? std::upper_bound(atom_t_.begin(), atom_t_.end(), t) : std::lower_bound(atom_t_.begin(), atom_t_.end(), t);
  double sum = atom_prefix_[static_cast<std::size_t>(it - atom_t_.begin())];
  for (std::size_t k = tables_.size(); k-- > 0;) {
    if (tables_[k].lo() >= t) continue;
    if (tables_[k].hi() <= t) return sum + tables_[k].total() + piece_before_[k];
    return sum + tables_[k].lower(t) + piece_before_[k];
  }
  return sum;
}

}  // namespace zonal
