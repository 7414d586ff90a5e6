#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "autocorr/certify.hpp"
#include "autocorr/fixedpoint.hpp"

namespace autocorr {

enum class Method { spectral, fixedpoint, both };
enum class RunMode { ci, paper };

struct RunConfig {
  std::string weight = "box";  // box | gaussian | tabulated
  std::string weight_path;     // tabulated only
  std::optional<double> gaussian_exponent;  // reporting only, see gaussian_constant_scale
  std::optional<double> delta;
  std::optional<double> eps_target;
  std::optional<double> lambda_step;
  std::optional<double> radius;
  double c_lb = 0.0;
  Method method = Method::spectral;
  RunMode mode = RunMode::ci;
  std::filesystem::path out = "out";
  std::size_t workers = 1;
  bool refine = true;
  ScanMode scan = ScanMode::warm;
  RadiusMode radius_mode = RadiusMode::fine;
  double fp_tol = 1e-12;
  std::size_t fp_max_iter = 100000;
  double fp_relaxation = 1.0;
};

/// Mode defaults: ci uses delta = 0.01, d lambda = 0.01; paper uses
/// delta = 1.45e-3, d lambda = 0.001.
struct ModeDefaults {
  double delta;
  double lambda_step;
};
ModeDefaults mode_defaults(RunMode mode);

/// Throws std::invalid_argument on inconsistent settings (both delta and
/// eps_target, unknown weight, missing table path, ...).
void validate(const RunConfig& cfg);

Weight make_weight(const RunConfig& cfg);
SweepConfig make_sweep_config(const RunConfig& cfg);

/// Applies one key=value setting (keys match the long CLI flags with '-'
/// replaced by '_').  Throws std::invalid_argument on unknown keys or values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
/// Flat key=value file; blank lines and '#' comments are ignored.
void load_config_file(const std::filesystem::path& path, RunConfig& cfg);

/// Sorted key=value lines of the resolved configuration; hashed into the manifest.
std::string canonical_config(const RunConfig& cfg);
std::string sha256_hex(const std::string& text);

std::string to_string(Method m);
std::string to_string(RunMode m);
Method parse_method(const std::string& s);
RunMode parse_mode(const std::string& s);

struct RunOutcome {
  int exit_code = 0;
  std::optional<BoundsReport> spectral;
  std::optional<FixedPointResult> fixed_point;
  std::filesystem::path report_path;
};

/// Writes report.json, extremizer dumps, per-lambda and k-scan tables, the
/// fixed-point trace and manifest.txt under cfg.out.  Exit code 0 on success,
/// 2 if the fixed point did not converge, 3 if some lambda had no feasible block.
RunOutcome run_solve(const RunConfig& cfg, std::ostream& log);

struct Table1Row {
  std::string weight;
  double lower = 0.0;
  double upper = 0.0;
  double fixed_point = 0.0;
  double paper_lower = 0.0;
  double paper_upper = 0.0;
  double paper_gap_bound = 0.0;
  double paper_fixed_point = 0.0;
};

/// Paper-mode runs of both methods for the box and the Gaussian weight.
std::vector<Table1Row> run_reproduce_table1(const std::filesystem::path& out,
                                            std::size_t workers, std::ostream& log);
void print_table1(std::ostream& os, const std::vector<Table1Row>& rows);

}  // namespace autocorr
