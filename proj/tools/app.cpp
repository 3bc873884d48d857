#include "app.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "zonal/checks.hpp"
#include "zonal/constants.hpp"
#include "zonal/error.hpp"
#include "zonal/estimates.hpp"

namespace zonal::app {

namespace {

int line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? mark.line + 1 : 0;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) { throw ConfigError(what, line_of(node)); }

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, "'" + key + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, "'" + key + "' has the wrong type");
  }
}

double number(const YAML::Node& map, const std::string& key, std::optional<double> fallback = std::nullopt) {
  const YAML::Node v = map[key];
  if (!v) {
    if (fallback) return *fallback;
    fail(map, "missing '" + key + "'");
  }
  const double x = scalar<double>(v, key);
  if (!std::isfinite(x)) fail(v, "'" + key + "' must be finite");
  return x;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

BodySpec parse_body(const YAML::Node& node, int n) {
  if (!node.IsMap()) fail(node, "a body is a map with a 'body' key");
  if (!node["body"]) fail(node, "missing 'body'");
  const auto kind = scalar<std::string>(node["body"], "body");
  BodySpec b;
  auto positive = [&](const std::string& key, double fallback) {
    const double x = number(node, key, fallback);
    if (!(x > 0)) fail(node[key] ? node[key] : node, "'" + key + "' must be positive");
    return x;
  };
  if (kind == "ball") {
    const double r = positive("radius", 1.0);
    b = {catalog::ball(n, r), "ball(radius=" + fmt(r) + ")"};
  } else if (kind == "disk") {
    const double r = positive("radius", 1.0);
    b = {catalog::disk(n, r), "disk(radius=" + fmt(r) + ")"};
  } else if (kind == "cone") {
    const double s = number(node, "apex");
    if (s == 0.0 || std::abs(s) > 1.0) fail(node["apex"], "'apex' must lie in [-1, 1] without 0");
    b = {catalog::cone(n, s), "cone(apex=" + fmt(s) + ")"};
  } else if (kind == "cylinder") {
    const double r = positive("radius", 1.0), l = positive("length", 1.0);
    b = {catalog::cylinder(n, r, l), "cylinder(radius=" + fmt(r) + ", length=" + fmt(l) + ")"};
  } else if (kind == "spheroid") {
    const double a = positive("vertical", 1.0), h = positive("horizontal", 1.0);
    b = {catalog::spheroid(n, a, h), "spheroid(vertical=" + fmt(a) + ", horizontal=" + fmt(h) + ")"};
  } else if (kind == "segment") {
    const double l = positive("length", 1.0);
    b = {catalog::segment(n, l), "segment(length=" + fmt(l) + ")"};
  } else {
    fail(node["body"], "unknown body '" + kind + "' (ball, disk, cone, cylinder, spheroid, segment)");
  }
  if (node["with_segment"]) {
    const double l = positive("with_segment", 0.0);
    b.body = catalog::with_segment(b.body, l);
    b.text += " + segment(" + fmt(l) + ")";
  }
  if (node["scale"]) {
    const double c = positive("scale", 1.0);
    b.body = catalog::scaled(b.body, c);
    b.text += " * " + fmt(c);
  }
  return b;
}

Fn power_density(double c, double p) {
  return [c, p](double t) { return c * std::pow((1 - t) * (1 + t), p); };
}

Fn polynomial(std::vector<double> coefficients) {
  return [cs = std::move(coefficients)](double t) {
    double v = 0.0;
    for (auto it = cs.rbegin(); it != cs.rend(); ++it) v = v * t + *it;
    return v;
  };
}

std::vector<double> number_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) fail(node, "'" + key + "' must be a list");
  std::vector<double> out;
  for (const auto& x : node) out.push_back(scalar<double>(x, key));
  return out;
}

std::pair<Fn, std::string> parse_term(const YAML::Node& node) {
  if (!node.IsMap() || !node["name"]) fail(node, "a function term is a map with a 'name' key");
  const auto name = scalar<std::string>(node["name"], "name");
  if (name == "polynomial") {
    if (!node["coefficients"]) fail(node, "missing 'coefficients'");
    const auto cs = number_list(node["coefficients"], "coefficients");
    std::string text = "polynomial(";
    for (std::size_t k = 0; k < cs.size(); ++k) text += (k ? ", " : "") + fmt(cs[k]);
    return {polynomial(cs), text + ")"};
  }
  if (name == "cos") {
    const double a = number(node, "amplitude", 1.0), w = number(node, "frequency", 1.0);
    return {[a, w](double t) { return a * std::cos(w * t); }, fmt(a) + " cos(" + fmt(w) + " t)"};
  }
  if (name == "exp") {
    const double a = number(node, "amplitude", 1.0), w = number(node, "rate", 1.0);
    return {[a, w](double t) { return a * std::exp(w * t); }, fmt(a) + " exp(" + fmt(w) + " t)"};
  }
  if (name == "power") {
    const double c = number(node, "scale", 1.0), p = number(node, "exponent");
    return {power_density(c, p), fmt(c) + " (1-t^2)^" + fmt(p)};
  }
  fail(node["name"], "unknown function '" + name + "' (polynomial, cos, exp, power)");
}

FunctionSpec parse_function(const YAML::Node& node) {
  FunctionSpec f;
  auto add = [&f](const YAML::Node& term) {
    auto [g, text] = parse_term(term);
    f.terms.push_back(std::move(g));
    f.text += (f.text.empty() ? "" : " + ") + text;
  };
  if (node.IsSequence()) {
    for (const auto& term : node) add(term);
  } else {
    add(node);
  }
  if (f.terms.empty()) fail(node, "empty function");
  return f;
}

ZonalMeasure parse_measure(const YAML::Node& node, const ProblemSpec& spec, const std::string& base_dir,
                           std::string& text) {
  if (!node.IsMap()) fail(node, "'measure' must be a map");
  std::vector<Atom> atoms;
  if (const auto a = node["atoms"]) {
    if (!a.IsSequence()) fail(a, "'atoms' must be a list of [t, mass] pairs");
    for (const auto& pair : a) {
      if (!pair.IsSequence() || pair.size() != 2) fail(pair, "an atom is a pair [t, mass]");
      const double t = scalar<double>(pair[0], "t"), m = scalar<double>(pair[1], "mass");
      if (std::abs(t) > 1.0) fail(pair, "atom location outside [-1, 1]");
      atoms.push_back({t, m});
      text += "atom(" + fmt(t) + ", " + fmt(m) + ") ";
    }
  }
  ZonalMeasure mu(-1.0, 1.0, atoms, {});
  if (const auto d = node["density"]) {
    if (!d.IsMap() || !d["name"]) fail(d, "'density' is a map with a 'name' key");
    const auto name = scalar<std::string>(d["name"], "name");
    if (name == "table") {
      if (!d["path"]) fail(d, "missing 'path'");
      auto path = std::filesystem::path(scalar<std::string>(d["path"], "path"));
      if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
      try {
        mu = mu + read_measure_file(path.string());
      } catch (const ConfigError& e) {
        fail(d["path"], std::string("table ") + path.string() + ": " + e.what());
      }
      text += "table(" + path.string() + ")";
    } else if (name == "pushforward") {
      if (!d["of"]) fail(d, "missing 'of'");
      const auto K = parse_body(d["of"], spec.n);
      mu = mu + mixed_area_pushforward(K.body, spec.i, spec.family);
      text += "pushforward(" + K.text + ")";
    } else {
      const auto [f, ftext] = parse_term(d);
      const EndKind end = name == "power" && number(d, "exponent") < 0 ? EndKind::singular : EndKind::regular;
      mu = mu + ZonalMeasure::with_density(f, -1.0, 1.0, end, end);
      text += ftext;
    }
  }
  if (!node["atoms"] && !node["density"]) fail(node, "'measure' needs 'atoms' or 'density'");
  return mu;
}

}  // namespace

double FunctionSpec::operator()(double t) const {
  double v = 0.0;
  for (const auto& f : terms) v += f(t);
  return v;
}

ProblemSpec parse_spec(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line + 1);
  }
  if (!root.IsMap()) throw ConfigError("spec must be a map", line_of(root));
  ProblemSpec spec;
  if (!root["n"]) fail(root, "missing 'n'");
  if (!root["i"]) fail(root, "missing 'i'");
  spec.n = scalar<int>(root["n"], "n");
  spec.i = scalar<int>(root["i"], "i");
  if (spec.n < 3) fail(root["n"], "'n' must be at least 3");
  if (spec.i < 1 || spec.i > spec.n - 2) fail(root["i"], "'i' must satisfy 1 <= i <= n-2");

  const auto ref = root["reference"];
  if (!ref) fail(root, "missing 'reference'");
  if (!ref.IsSequence()) fail(ref, "'reference' must be a list of bodies");
  std::vector<BodyOfRevolution> bodies;
  for (const auto& entry : ref) {
    const auto b = parse_body(entry, spec.n);
    const int count = entry["count"] ? scalar<int>(entry["count"], "count") : 1;
    if (count < 1) fail(entry["count"], "'count' must be positive");
    if (b.body.is_segment) fail(entry, "a reference body cannot be a segment");
    for (int k = 0; k < count; ++k) {
      spec.reference.push_back(b);
      bodies.push_back(b.body);
    }
  }
  if (static_cast<int>(bodies.size()) != spec.n - 1 - spec.i) {
    fail(ref, "reference family has " + std::to_string(bodies.size()) + " bodies, needs n-1-i = " +
                  std::to_string(spec.n - 1 - spec.i));
  }
  spec.family = family_data(bodies);

  if (root["target"]) spec.target = parse_body(root["target"], spec.n);
  if (root["measure"]) spec.measure = parse_measure(root["measure"], spec, base_dir, spec.measure_text);

  if (const auto tol = root["tolerance"]) {
    if (!tol.IsMap()) fail(tol, "'tolerance' must be a map");
    spec.residual_tol = number(tol, "residual", spec.residual_tol);
    spec.solve.centering = number(tol, "centering", spec.solve.centering);
    spec.solve.nonnegative = number(tol, "nonnegative", spec.solve.nonnegative);
    spec.solve.pole_consistency = number(tol, "pole_consistency", spec.solve.pole_consistency);
  }
  if (const auto f = root["firey"]) {
    if (!f.IsMap()) fail(f, "'firey' must be a map");
    if (f["pole"]) {
      const auto p = scalar<std::string>(f["pole"], "pole");
      if (p == "plus") spec.poles = {Pole::plus};
      else if (p == "minus") spec.poles = {Pole::minus};
      else if (p == "both") spec.poles = {Pole::plus, Pole::minus};
      else fail(f["pole"], "'pole' is plus, minus or both");
    }
  }
  if (const auto h = root["hadwiger"]) {
    if (!h.IsMap()) fail(h, "'hadwiger' must be a map");
    if (!h["function"]) fail(h, "missing 'function'");
    spec.function = parse_function(h["function"]);
    if (h["cones"]) {
      spec.cones = number_list(h["cones"], "cones");
      for (double s : spec.cones)
        if (s == 0.0 || std::abs(s) > 1.0) fail(h["cones"], "cone apex parameters lie in [-1, 1] without 0");
    }
  }
  if (const auto out = root["output"]) {
    if (!out.IsMap() || !out["dir"]) fail(out, "'output' is a map with a 'dir' key");
    spec.out_dir = scalar<std::string>(out["dir"], "dir");
  }
  return spec;
}

ProblemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), std::filesystem::path(path).parent_path().string());
}

namespace {

// Node k of n on a piece [lo, hi], Chebyshev in theta = arccos t.
double theta_node(double th_lo, double th_hi, int k, int n) {
  return 0.5 * (th_lo + th_hi) - 0.5 * (th_hi - th_lo) * std::cos(M_PI * (k + 0.5) / n);
}

// Barycentric interpolation through first-kind Chebyshev nodes.
class ChebyshevTable {
 public:
  ChebyshevTable(double th_lo, double th_hi, std::vector<double> values)
      : a_(th_lo), b_(th_hi), v_(std::move(values)) {
    const int n = static_cast<int>(v_.size());
    for (int k = 0; k < n; ++k) {
      x_.push_back(theta_node(a_, b_, k, n));
      w_.push_back((k % 2 ? -1.0 : 1.0) * std::sin(M_PI * (k + 0.5) / n));
    }
  }
  double operator()(double theta) const {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < x_.size(); ++k) {
      const double d = theta - x_[k];
      if (d == 0.0) return v_[k];
      const double c = w_[k] / d;
      num += c * v_[k];
      den += c;
    }
    return num / den;
  }

 private:
  double a_, b_;
  std::vector<double> v_, x_, w_;
};

const char* kind_name(EndKind k) { return k == EndKind::singular ? "singular" : "regular"; }

}  // namespace

void write_measure(std::ostream& os, const ZonalMeasure& mu, int grid) {
  os << std::setprecision(17);
  os << "# total " << integrate([](double) { return 1.0; }, mu) << "\n";
  os << "# first_moment " << moment(mu, MomentKind::first) << "\n";
  os << "# columns t value\n";
  for (const auto& p : mu.pieces()) {
    os << "# PIECE " << p.lo << " " << p.hi << " " << kind_name(p.lo_kind) << " " << kind_name(p.hi_kind) << "\n";
    const double th_lo = std::acos(p.hi), th_hi = std::acos(p.lo);
    for (int k = grid - 1; k >= 0; --k) {
      const double t = std::cos(theta_node(th_lo, th_hi, k, grid));
      os << t << " " << p.f(t) << "\n";
    }
  }
  os << "#ATOMS\n";
  for (const auto& a : mu.atoms()) os << a.t << " " << a.mass << "\n";
}

ZonalMeasure read_measure(std::istream& is) {
  struct Piece {
    double lo, hi;
    EndKind lo_kind, hi_kind;
    std::vector<double> values;
  };
  std::vector<Piece> pieces;
  std::vector<Atom> atoms;
  enum { none, piece, atom } block = none;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string tag;
      ls >> tag;
      if (line.rfind("#ATOMS", 0) == 0) {
        block = atom;
      } else if (tag == "PIECE") {
        Piece p;
        std::string lk, hk;
        if (!(ls >> p.lo >> p.hi >> lk >> hk)) throw ConfigError("malformed PIECE header", number);
        p.lo_kind = lk == "singular" ? EndKind::singular : EndKind::regular;
        p.hi_kind = hk == "singular" ? EndKind::singular : EndKind::regular;
        pieces.push_back(p);
        block = piece;
      }
      continue;
    }
    std::istringstream ls(line);
    double t, v;
    if (!(ls >> t >> v)) throw ConfigError("expected two numbers", number);
    if (block == piece) {
      pieces.back().values.push_back(v);
    } else if (block == atom) {
      atoms.push_back({t, v});
    } else {
      throw ConfigError("data outside a PIECE or ATOMS block", number);
    }
  }
  std::vector<DensityPiece> out;
  for (auto& p : pieces) {
    if (p.values.size() < 2) throw ConfigError("piece [" + fmt(p.lo) + ", " + fmt(p.hi) + "] has too few samples");
    // Rows run in increasing t, i.e. decreasing theta.
    std::reverse(p.values.begin(), p.values.end());
    auto table = std::make_shared<ChebyshevTable>(std::acos(p.hi), std::acos(p.lo), std::move(p.values));
    out.push_back({p.lo, p.hi, [table](double t) { return (*table)(std::acos(t)); }, p.lo_kind, p.hi_kind});
  }
  return ZonalMeasure(-1.0, 1.0, atoms, out);
}

ZonalMeasure read_measure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  return read_measure(in);
}

namespace {

void header(std::ostream& os, const std::string& command, const ProblemSpec& spec) {
  os << "# " << command << " n=" << spec.n << " i=" << spec.i << "\n";
  os << "# reference";
  for (const auto& b : spec.reference) os << " " << b.text;
  os << "\n";
  if (spec.target) os << "# target " << spec.target->text << "\n";
}

const BodyOfRevolution& require_target(const ProblemSpec& spec, const char* command) {
  if (!spec.target) throw ConfigError(std::string(command) + " needs a 'target' body");
  return spec.target->body;
}

}  // namespace

int cmd_measure(const ProblemSpec& spec, const RunOptions& run, std::ostream& os) {
  const auto& K = require_target(spec, "measure");
  header(os, "measure", spec);
  write_measure(os, mixed_area_pushforward(K, spec.i, spec.family), run.grid);
  return ok;
}

int cmd_solve(const ProblemSpec& spec, const RunOptions& run, std::ostream& os) {
  ZonalMeasure mu;
  if (spec.measure) {
    mu = *spec.measure;
  } else {
    mu = mixed_area_pushforward(require_target(spec, "solve"), spec.i, spec.family);
  }
  const double tol = run.tol.value_or(spec.residual_tol);
  const SolveReport rep = solve(mu, spec.family, spec.n, spec.i, spec.solve);
  header(os, "solve", spec);
  if (spec.measure) os << "# measure " << spec.measure_text << "\n";
  os << std::setprecision(12);
  auto clause = [&os](const char* name, const ClauseVerdict& v) {
    os << "# clause " << name << " " << (v.pass ? "pass" : "fail") << " margin " << v.margin << " (" << v.detail << ")\n";
  };
  clause("i", rep.support);
  clause("ii", rep.not_equatorial);
  clause("iv", rep.endpoints);
  clause("iii", rep.transformed);
  clause("v", rep.equator_inequality);
  os << "# positivity_interval " << rep.a_minus << " " << rep.a_plus << "\n";
  os << "# uniqueness " << to_string(rep.uniqueness) << "\n";
  if (!rep.body) {
    os << "# status infeasible, failed clause " << rep.failed_clause() << "\n";
    return infeasible;
  }
  const auto& K = *rep.body;
  const bool good = rep.residual <= tol;
  os << "# status " << (good ? "solved" : "residual above tolerance") << "\n";
  os << "# residual " << rep.residual << " tolerance " << tol << "\n";
  os << "# waist " << K.waist() << "\n";
  os << "# segment " << K.segment << "\n";
  os << "# degenerate " << (rep.degenerate ? "yes" : "no") << "\n";
  os << "# columns t profile\n" << std::setprecision(17);
  for (int k = 0; k < run.grid; ++k) {
    const double t = -std::cos(M_PI * (k + 0.5) / run.grid);
    os << t << " " << K.profile(t) << "\n";
  }
  return good ? ok : check_failed;
}

int cmd_firey(const ProblemSpec& spec, const RunOptions& run, std::ostream& os) {
  const auto& K = require_target(spec, "firey");
  header(os, "firey", spec);
  std::vector<double> ts;
  for (int k = 1; k <= run.grid; ++k) ts.push_back(static_cast<double>(k) / run.grid);
  bool holds = true;
  os << std::setprecision(17);
  for (Pole pole : spec.poles) {
    const auto curve = cap_curve(K, spec.family, spec.i, pole, ts);
    os << "# pole " << (pole == Pole::plus ? "plus" : "minus") << "\n# columns t measured bound ratio\n";
    for (std::size_t k = 0; k < curve.t.size(); ++k) {
      os << curve.t[k] << " " << curve.measured[k] << " " << curve.bound[k] << " " << curve.ratio[k] << "\n";
      if (curve.measured[k] > curve.bound[k] * (1 + 1e-9) + 1e-12) holds = false;
    }
  }
  os << "# bound " << (holds ? "holds" : "violated") << "\n";
  return holds ? ok : check_failed;
}

int cmd_hadwiger(const ProblemSpec& spec, const RunOptions& run, std::ostream& os) {
  if (!spec.function) throw ConfigError("hadwiger needs a 'hadwiger.function'");
  const FunctionSpec g = *spec.function;
  const Fn gf = [g](double t) { return g(t); };
  const auto f = t_hat_inverse(spec.family, IntervalFunction::on(gf));
  const double tol = run.tol.value_or(spec.residual_tol);
  header(os, "hadwiger", spec);
  os << "# function " << g.text << "\n" << std::setprecision(15);
  bool agree = true;
  auto row = [&](const std::string& name, const BodyOfRevolution& K, std::optional<double> closed) {
    const auto v = valuation_pv(f, K, spec.family, spec.i);
    const double direct = integrate(gf, disk_mixed_pushforward(K, spec.i));
    const double scale = std::max(1.0, std::abs(direct));
    const bool same = v.pv.converged && std::abs(v.pv.value - direct) <= tol * scale;
    agree = agree && same;
    os << name << " " << direct << " " << v.disk << " " << v.pv.value << " ";
    if (closed) os << *closed;
    else os << "nan";
    os << " " << (v.pv.converged ? "converged" : "not-converged") << "\n";
  };
  os << "# columns body disk_route transform_route principal_value closed_form status\n";
  for (double s : spec.cones) row("cone(" + fmt(s) + ")", catalog::cone(spec.n, s), cone_valuation(gf, s, spec.n));
  if (spec.target) row(spec.target->text, spec.target->body, std::nullopt);
  if (spec.cones.empty() && !spec.target) throw ConfigError("hadwiger needs 'hadwiger.cones' or a 'target'");
  os << "# routes " << (agree ? "agree" : "disagree") << "\n";
  return agree ? ok : check_failed;
}

int cmd_selftest(const RunOptions& run, std::ostream& os) {
  checks::Options o;
  o.seed = run.seed;
  o.full = run.full;
  o.kubota_scale = run.kubota_scale;
  o.equator_scale = run.equator_scale;
  int failed = 0;
  for (const auto& e : checks::registry()) {
    const auto r = checks::run(e, o);
    os << (r.pass ? "PASS" : "FAIL") << " " << r.id << " " << r.name << ": " << r.detail << "\n" << std::flush;
    if (!r.pass) ++failed;
  }
  os << "# " << failed << " of " << checks::registry().size() << " checks failed\n";
  return failed ? check_failed : ok;
}

}  // namespace zonal::app
