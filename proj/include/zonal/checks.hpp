#pragma once

#include <functional>
#include <string>
#include <vector>

namespace zonal::checks {

struct Options {
  unsigned seed = 1729;
  bool full = true;  // false runs a reduced sample of every check
  // Perturbation hooks; a healthy build fails the matching check when these move off 1.
  double kubota_scale = 1.0;
  double equator_scale = 1.0;
};

struct Result {
  int id = 0;
  std::string name;
  bool pass = false;
  double worst = 0.0;      // largest observed error, or a margin for qualitative checks
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

Result transformation_rule(const Options& o);
Result group_property(const Options& o);
Result adjoint_duality(const Options& o);
Result smooth_oracle(const Options& o);
Result round_trips(const Options& o);
Result negative_cases(const Options& o);
Result cap_bound(const Options& o);
Result density_limits(const Options& o);
Result cone_valuations(const Options& o);
Result total_masses(const Options& o);

struct Entry {
  int id;
  const char* name;
  std::function<Result(const Options&)> run;
};
const std::vector<Entry>& registry();

// Runs the entry, timing it and turning exceptions into failures.
Result run(const Entry& e, const Options& o);

}  // namespace zonal::checks
