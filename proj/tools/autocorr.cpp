// Command-line driver: solve, fixed-point, reproduce-table1, kernel-dump.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "autocorr/driver.hpp"
#include "autocorr/report.hpp"

namespace {

using autocorr::RunConfig;

// Long flag name -> config key.  Every flag can also be given in --config.
const char* const kRunKeys[] = {"weight",      "weight-file", "gaussian-exponent", "delta",
                                "eps-target",  "lambda-step", "radius",            "c-lb",
                                "method",      "mode",        "out",               "workers",
                                "refine",      "scan",        "radius-mode",       "fp-tol",
                                "fp-max-iter", "fp-relaxation"};

struct RunFlags {
  std::string config;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_run_flags(CLI::App* app, RunFlags& flags) {
  app->add_option("--config", flags.config, "flat key=value file; flags override it");
  for (const char* key : kRunKeys) {
    std::string& slot = flags.values[key];
    flags.options[key] = app->add_option(std::string("--") + key, slot);
  }
  flags.options["weight"]->description("box | gaussian | tabulated");
  flags.options["weight-file"]->description("two-column (x, w(x)) table for --weight tabulated");
  flags.options["gaussian-exponent"]->description("also report constants rescaled to exp(-a x^2)");
  flags.options["delta"]->description("grid step (default from --mode)");
  flags.options["eps-target"]->description("pick delta so the discretization error is below this");
  flags.options["method"]->description("spectral | fixedpoint | both");
  flags.options["mode"]->description("ci (delta 0.01, step 0.01) | paper (delta 1.45e-3, step 0.001)");
  flags.options["workers"]->description("parallel lambda workers (default: hardware threads)");
  flags.options["scan"]->description("warm | full support-size scan");
  flags.options["radius-mode"]->description("fine | coarse support-radius bound");
  flags.options["lambda-step"]->description("lambda grid spacing (default from --mode)");
  flags.options["radius"]->description("support radius a (default: a priori bound)");
  flags.options["c-lb"]->description("lower bound fixing the lambda range (default: bootstrap)");
  flags.options["out"]->description("output directory (default out)");
  flags.options["refine"]->description("yes | no local refinement around the best lambda");
  flags.options["fp-tol"]->description("fixed-point stopping tolerance (default 1e-12)");
  flags.options["fp-max-iter"]->description("fixed-point iteration cap (default 100000)");
  flags.options["fp-relaxation"]->description("damping in (0, 1] (default 1)");
}

RunConfig resolve(const RunFlags& flags) {
  RunConfig cfg;
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  if (!flags.config.empty()) autocorr::load_config_file(flags.config, cfg);
  for (const char* key : kRunKeys) {
    if (flags.options.at(key)->count() == 0) continue;
    std::string k = key;
    for (char& c : k)
      if (c == '-') c = '_';
    autocorr::apply_setting(cfg, k, flags.values.at(key));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified bounds for weighted autocorrelation constants"};
  app.require_subcommand(1);

  RunFlags solve_flags, fp_flags;
  auto* solve = app.add_subcommand("solve", "spectral bounds (and optionally the fixed point)");
  add_run_flags(solve, solve_flags);
  auto* fixed = app.add_subcommand("fixed-point", "fixed-point iteration only");
  add_run_flags(fixed, fp_flags);

  auto* table = app.add_subcommand("reproduce-table1", "full-resolution runs for box and Gaussian");
  std::string table_out = "table1";
  std::size_t table_workers = std::max(1u, std::thread::hardware_concurrency());
  table->add_option("--out", table_out, "output directory (default table1)");
  table->add_option("--workers", table_workers, "parallel lambda workers");

  auto* dump = app.add_subcommand("kernel-dump", "print (k, k delta, w~(k delta)) rows");
  std::string dump_weight = "box", dump_file, dump_out;
  double dump_delta = 0.01;
  std::size_t dump_lags = 100;
  dump->add_option("--weight", dump_weight, "box | gaussian | tabulated");
  dump->add_option("--weight-file", dump_file, "table for --weight tabulated");
  dump->add_option("--delta", dump_delta, "grid step (default 0.01)")->check(CLI::PositiveNumber);
  dump->add_option("--lags", dump_lags, "number of rows (default 100)")->check(CLI::PositiveNumber);
  dump->add_option("--out", dump_out, "file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed() || fixed->parsed()) {
      RunConfig cfg = resolve(solve->parsed() ? solve_flags : fp_flags);
      if (fixed->parsed()) cfg.method = autocorr::Method::fixedpoint;
      const auto outcome = autocorr::run_solve(cfg, std::cout);
      std::cout << "report: " << outcome.report_path.string() << '\n';
      return outcome.exit_code;
    }
    if (table->parsed()) {
      const auto rows = autocorr::run_reproduce_table1(table_out, table_workers, std::cerr);
      autocorr::print_table1(std::cout, rows);
      std::ofstream os(std::filesystem::path(table_out) / "table1.txt");
      autocorr::print_table1(os, rows);
      return 0;
    }
    if (dump->parsed()) {
      RunConfig cfg;
      cfg.weight = dump_weight;
      cfg.weight_path = dump_file;
      autocorr::validate(cfg);
      const auto kernel = autocorr::build_kernel(autocorr::make_weight(cfg), dump_delta, dump_lags);
      if (dump_out.empty()) {
        autocorr::write_kernel_dump(std::cout, kernel);
      } else {
        std::ofstream os(dump_out);
        if (!os) throw std::runtime_error("cannot write " + dump_out);
        autocorr::write_kernel_dump(os, kernel);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
