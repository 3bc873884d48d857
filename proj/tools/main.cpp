#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "app.hpp"
#include "zonal/error.hpp"

using namespace zonal::app;

int main(int argc, char** argv) {
  CLI::App cli{"Zonal mixed area measures: forward maps, Christoffel-Minkowski solver, cap estimates"};
  cli.require_subcommand(1);
  std::string spec_path;
  RunOptions run;
  double tol = -1.0;

  auto common = [&](CLI::App* sub, bool needs_spec) {
    auto* opt = sub->add_option("--spec", spec_path, "problem specification (YAML)");
    if (needs_spec) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", run.out_dir, "write <command>.txt into this directory");
    sub->add_option("--tol", tol, "residual / agreement tolerance override");
    sub->add_option("--grid", run.grid, "table resolution")->check(CLI::Range(2, 1 << 20));
    sub->add_option("--seed", run.seed, "seed for randomized checks");
  };
  auto* measure = cli.add_subcommand("measure", "forward pushforward table of the target body");
  auto* solve = cli.add_subcommand("solve", "recover a body from a measure (or round trip the target)");
  auto* firey = cli.add_subcommand("firey", "cap masses against the cap bound");
  auto* hadwiger = cli.add_subcommand("hadwiger", "valuation through the principal value and the disk");
  auto* selftest = cli.add_subcommand("selftest", "run the property checks");
  for (auto* sub : {measure, solve, firey, hadwiger}) common(sub, true);
  common(selftest, false);
  selftest->add_flag("--full", run.full, "run every check at full size");
  selftest->add_option("--perturb-kubota", run.kubota_scale, "scale the Kubota factor (should make checks fail)");
  selftest->add_option("--perturb-equator", run.equator_scale, "scale the equator weight (should make checks fail)");

  CLI11_PARSE(cli, argc, argv);
  if (tol > 0) run.tol = tol;

  const std::string command = cli.get_subcommands().front()->get_name();
  try {
    ProblemSpec spec;
    if (command != "selftest") spec = load_spec(spec_path);
    if (run.out_dir.empty()) run.out_dir = spec.out_dir;

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!run.out_dir.empty()) {
      std::filesystem::create_directories(run.out_dir);
      const auto path = std::filesystem::path(run.out_dir) / (command + ".txt");
      file.open(path);
      if (!file) throw ConfigError("cannot write " + path.string());
      os = &file;
    }
    int code = ok;
    if (command == "measure") code = cmd_measure(spec, run, *os);
    else if (command == "solve") code = cmd_solve(spec, run, *os);
    else if (command == "firey") code = cmd_firey(spec, run, *os);
    else if (command == "hadwiger") code = cmd_hadwiger(spec, run, *os);
    else code = cmd_selftest(run, *os);
    return code;
  } catch (const ConfigError& e) {
    std::cerr << (spec_path.empty() ? "error" : spec_path);
    if (e.line() > 0) std::cerr << ":" << e.line();
    std::cerr << ": " << e.what() << "\n";
    return invalid;
  } catch (const zonal::Error& e) {
    std::cerr << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == zonal::ErrorKind::infeasible || e.kind() == zonal::ErrorKind::equator_mass_with_zero_waist
               ? infeasible
               : invalid;
  }
}
