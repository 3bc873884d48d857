#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zonal/body.hpp"
#include "zonal/solver.hpp"

namespace zonal::app {

enum Exit { ok = 0, check_failed = 1, invalid = 2, infeasible = 3 };

// Invalid configuration; line is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct BodySpec {
  BodyOfRevolution body;
  std::string text;  // e.g. "cylinder(radius=1, length=0.7)"
};

// Zonal function g on [-1, 1] as a sum of named terms.
struct FunctionSpec {
  std::vector<std::function<double(double)>> terms;
  std::string text;
  double operator()(double t) const;
};

struct ProblemSpec {
  int n = 3, i = 1;
  std::vector<BodySpec> reference;
  ReferenceFamily family;
  std::optional<BodySpec> target;
  std::optional<ZonalMeasure> measure;
  std::string measure_text;
  SolveOptions solve;
  double residual_tol = 1e-6;
  std::vector<Pole> poles = {Pole::plus};
  std::optional<FunctionSpec> function;
  std::vector<double> cones;
  std::string out_dir;
};

ProblemSpec parse_spec(const std::string& text, const std::string& base_dir = ".");
ProblemSpec load_spec(const std::string& path);

struct RunOptions {
  std::string out_dir;
  std::optional<double> tol;
  int grid = 512;
  unsigned seed = 1729;
  bool full = false;
  double kubota_scale = 1.0;
  double equator_scale = 1.0;
};

// Tabular measure format: '#' header lines, density samples per piece after
// '# PIECE lo hi' at Chebyshev nodes in arccos t, and a '#ATOMS' block.
void write_measure(std::ostream& os, const ZonalMeasure& mu, int grid);
ZonalMeasure read_measure(std::istream& is);
ZonalMeasure read_measure_file(const std::string& path);

int cmd_measure(const ProblemSpec& spec, const RunOptions& run, std::ostream& os);
int cmd_solve(const ProblemSpec& spec, const RunOptions& run, std::ostream& os);
int cmd_firey(const ProblemSpec& spec, const RunOptions& run, std::ostream& os);
int cmd_hadwiger(const ProblemSpec& spec, const RunOptions& run, std::ostream& os);
int cmd_selftest(const RunOptions& run, std::ostream& os);

}  // namespace zonal::app
