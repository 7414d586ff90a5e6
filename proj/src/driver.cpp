#include "autocorr/driver.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "autocorr/report.hpp"

namespace autocorr {

using Json = nlohmann::ordered_json;

ModeDefaults mode_defaults(RunMode mode) {
  return mode == RunMode::paper ? ModeDefaults{1.45e-3, 1e-3} : ModeDefaults{0.01, 0.01};
}

std::string to_string(Method m) {
  switch (m) {
    case Method::spectral: return "spectral";
    case Method::fixedpoint: return "fixedpoint";
    case Method::both: return "both";
  }
  return "?";
}

std::string to_string(RunMode m) { return m == RunMode::paper ? "paper" : "ci"; }

Method parse_method(const std::string& s) {
  if (s == "spectral") return Method::spectral;
  if (s == "fixedpoint" || s == "fixed-point") return Method::fixedpoint;
  if (s == "both") return Method::both;
  throw std::invalid_argument("unknown method '" + s + "' (spectral | fixedpoint | both)");
}

RunMode parse_mode(const std::string& s) {
  if (s == "ci") return RunMode::ci;
  if (s == "paper") return RunMode::paper;
  throw std::invalid_argument("unknown mode '" + s + "' (ci | paper)");
}

void validate(const RunConfig& cfg) {
  if (cfg.weight != "box" && cfg.weight != "gaussian" && cfg.weight != "tabulated")
    throw std::invalid_argument("unknown weight '" + cfg.weight + "' (box | gaussian | tabulated)");
  if (cfg.weight == "tabulated" && cfg.weight_path.empty())
    throw std::invalid_argument("tabulated weight needs --weight-file");
  if (cfg.delta && cfg.eps_target)
    throw std::invalid_argument("give at most one of delta and eps_target");
  if (cfg.delta && !(*cfg.delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (cfg.eps_target && !(*cfg.eps_target > 0.0))
    throw std::invalid_argument("eps_target must be positive");
  if (cfg.lambda_step && !(*cfg.lambda_step > 0.0))
    throw std::invalid_argument("lambda_step must be positive");
  if (cfg.radius && !(*cfg.radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (cfg.gaussian_exponent && !(*cfg.gaussian_exponent > 0.0))
    throw std::invalid_argument("gaussian exponent must be positive");
  if (!(cfg.fp_relaxation > 0.0 && cfg.fp_relaxation <= 1.0))
    throw std::invalid_argument("fixed-point relaxation must lie in (0, 1]");
  if (cfg.workers == 0) throw std::invalid_argument("workers must be at least 1");
}

Weight make_weight(const RunConfig& cfg) {
  if (cfg.weight == "box") return Weight::box();
  if (cfg.weight == "gaussian") return Weight::gaussian();
  return Weight::load_tabulated(cfg.weight_path);
}

SweepConfig make_sweep_config(const RunConfig& cfg) {
  const ModeDefaults d = mode_defaults(cfg.mode);
  SweepConfig s;
  if (cfg.eps_target) {
    s.eps_target = *cfg.eps_target;
  } else {
    s.delta = cfg.delta.value_or(d.delta);
  }
  s.lambda_step = cfg.lambda_step.value_or(d.lambda_step);
  s.radius = cfg.radius.value_or(0.0);
  s.c_lb_prior = cfg.c_lb;
  s.radius_mode = cfg.radius_mode;
  s.refine = cfg.refine;
  s.scan = cfg.scan;
  s.workers = cfg.workers;
  return s;
}

namespace {

double parse_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw std::invalid_argument("setting " + key + ": '" + value + "' is not a number");
  return x;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("setting " + key + ": '" + value + "' is not a boolean");
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "weight") cfg.weight = value;
  else if (key == "weight_file") cfg.weight_path = value;
  else if (key == "gaussian_exponent") cfg.gaussian_exponent = parse_real(key, value);
  else if (key == "delta") cfg.delta = parse_real(key, value);
  else if (key == "eps_target") cfg.eps_target = parse_real(key, value);
  else if (key == "lambda_step") cfg.lambda_step = parse_real(key, value);
  else if (key == "radius") cfg.radius = parse_real(key, value);
  else if (key == "c_lb") cfg.c_lb = parse_real(key, value);
  else if (key == "method") cfg.method = parse_method(value);
  else if (key == "mode") cfg.mode = parse_mode(value);
  else if (key == "out") cfg.out = value;
  else if (key == "workers") cfg.workers = static_cast<std::size_t>(parse_real(key, value));
  else if (key == "refine") cfg.refine = parse_bool(key, value);
  else if (key == "scan") {
    if (value != "full" && value != "warm")
      throw std::invalid_argument("setting scan: expected full or warm");
    cfg.scan = value == "full" ? ScanMode::full : ScanMode::warm;
  } else if (key == "radius_mode") {
    if (value != "fine" && value != "coarse")
      throw std::invalid_argument("setting radius_mode: expected fine or coarse");
    cfg.radius_mode = value == "fine" ? RadiusMode::fine : RadiusMode::coarse;
  } else if (key == "fp_tol") cfg.fp_tol = parse_real(key, value);
  else if (key == "fp_max_iter") cfg.fp_max_iter = static_cast<std::size_t>(parse_real(key, value));
  else if (key == "fp_relaxation") cfg.fp_relaxation = parse_real(key, value);
  else throw std::invalid_argument("unknown setting '" + key + "'");
}

void load_config_file(const std::filesystem::path& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(fmt::format("{}:{}: expected key=value", path.string(), lineno));
    std::string key = trim(line.substr(0, eq));
    for (char& c : key)
      if (c == '-') c = '_';
    apply_setting(cfg, key, trim(line.substr(eq + 1)));
  }
}

std::string canonical_config(const RunConfig& cfg) {
  const SweepConfig s = make_sweep_config(cfg);
  std::map<std::string, std::string> kv;
  kv["weight"] = cfg.weight;
  kv["weight_file"] = cfg.weight_path;
  kv["gaussian_exponent"] = cfg.gaussian_exponent ? format_real(*cfg.gaussian_exponent) : "";
  kv["delta"] = s.delta > 0.0 ? format_real(s.delta) : "";
  kv["eps_target"] = s.eps_target > 0.0 ? format_real(s.eps_target) : "";
  kv["lambda_step"] = format_real(s.lambda_step);
  kv["radius"] = s.radius > 0.0 ? format_real(s.radius) : "";
  kv["radius_mode"] = cfg.radius_mode == RadiusMode::fine ? "fine" : "coarse";
  kv["c_lb"] = format_real(cfg.c_lb);
  kv["method"] = to_string(cfg.method);
  kv["mode"] = to_string(cfg.mode);
  kv["refine"] = cfg.refine ? "true" : "false";
  kv["scan"] = cfg.scan == ScanMode::full ? "full" : "warm";
  kv["fp_tol"] = format_real(cfg.fp_tol);
  kv["fp_max_iter"] = std::to_string(cfg.fp_max_iter);
  kv["fp_relaxation"] = format_real(cfg.fp_relaxation);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

namespace {

struct Grid {
  double delta = 0.0;
  double radius = 0.0;
};

// Grid for a fixed-point-only run, chosen exactly as the sweep would.
Grid fixed_point_grid(const Weight& w, const SweepConfig& s) {
  double c_lb = s.c_lb_prior > 0.0 ? s.c_lb_prior : bootstrap_lower_bound(w);
  double delta = s.delta;
  if (!(delta > 0.0)) delta = choose_delta(s.eps_target, lambda_range(c_lb).lo, c_lb);
  double radius = s.radius > 0.0 ? s.radius : support_radius_bound(w.norms(), c_lb, s.radius_mode).radius;
  return {delta, snap_radius(radius, delta)};
}

}  // namespace

RunOutcome run_solve(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  const Weight weight = make_weight(cfg);
  const SweepConfig scfg = make_sweep_config(cfg);
  std::filesystem::create_directories(cfg.out);

  RunOutcome outcome;
  std::vector<std::string> artifacts;
  Json report;
  report["weight"] = weight.descriptor();
  report["method"] = to_string(cfg.method);
  report["mode"] = to_string(cfg.mode);

  Grid grid;
  if (cfg.method != Method::fixedpoint) {
    log << "spectral sweep: weight " << weight.descriptor() << '\n';
    BoundsReport rep = sweep(weight, scfg);
    const ReportPaths paths{"per_lambda.txt", "k_scan.txt", "extremizer.txt"};
    write_per_lambda_table(cfg.out / paths.per_lambda, rep);
    write_scan_table(cfg.out / paths.scan, rep);
    write_extremizer(cfg.out / paths.extremizer, rep.extremizer,
                     {"spectral extremizer, " + weight.descriptor(), rep.lambda_star});
    artifacts.insert(artifacts.end(), {paths.per_lambda, paths.scan, paths.extremizer});
    Json sj = spectral_json(rep, paths);
    for (auto it = sj.begin(); it != sj.end(); ++it) report[it.key()] = it.value();
    log << fmt::format("  lower {:.10f}  upper {:.10f}  gap {:.3e}  lambda* {:.6f}\n",
                       rep.lower, rep.upper, rep.upper - rep.lower, rep.lambda_star);
    if (rep.infeasible_points > 0) {
      log << "  " << rep.infeasible_points << " lambda points used the clipped fallback\n";
      outcome.exit_code = 3;
    }
    grid = {rep.delta, rep.radius};
    outcome.spectral = std::move(rep);
  } else {
    grid = fixed_point_grid(weight, scfg);
    report["delta"] = grid.delta;
    report["radius"] = grid.radius;
  }

  if (cfg.method != Method::spectral) {
    log << "fixed-point iteration on delta = " << format_real(grid.delta)
        << ", radius = " << format_real(grid.radius) << '\n';
    const DiscretizedKernel kernel =
        build_kernel(weight, grid.delta, StepFunction::cell_count(grid.delta, grid.radius));
    FixedPointOptions fopts;
    fopts.tol = cfg.fp_tol;
    fopts.max_iter = cfg.fp_max_iter;
    fopts.relaxation = cfg.fp_relaxation;
    FixedPointResult fp =
        fixed_point_iterate(kernel, default_initial_guess(grid.delta, grid.radius), fopts);
    write_trace(cfg.out / "fixedpoint_trace.txt", fp);
    write_extremizer(cfg.out / "fixedpoint_extremizer.txt", fp.extremizer,
                     {"fixed-point extremizer, " + weight.descriptor(), 0.0});
    artifacts.insert(artifacts.end(), {"fixedpoint_trace.txt", "fixedpoint_extremizer.txt"});
    report["fixed_point"] =
        fixed_point_json(fp, "fixedpoint_trace.txt", "fixedpoint_extremizer.txt");
    if (outcome.spectral) report["fixed_point"]["minus_spectral_lower"] = fp.value - outcome.spectral->lower;
    log << fmt::format("  value {:.10f}  iterations {}  converged {}\n", fp.value, fp.iterations,
                       fp.converged);
    if (!fp.converged) outcome.exit_code = 2;
    outcome.fixed_point = std::move(fp);
  }

  if (cfg.gaussian_exponent) {
    const double scale = gaussian_constant_scale(*cfg.gaussian_exponent);
    Json g;
    g["exponent"] = *cfg.gaussian_exponent;
    g["constant_scale"] = scale;
    if (outcome.spectral) {
      g["lower"] = scale * outcome.spectral->lower;
      g["upper"] = scale * outcome.spectral->upper;
    }
    if (outcome.fixed_point) g["fixed_point"] = scale * outcome.fixed_point->value;
    report["rescaled_gaussian"] = g;
  }

  const std::string config_text = canonical_config(cfg);
  report["config_sha256"] = sha256_hex(config_text);
  outcome.report_path = cfg.out / "report.json";
  {
    std::ofstream os(outcome.report_path);
    if (!os) throw std::runtime_error("cannot write " + outcome.report_path.string());
    os << to_json_text(report);
  }
  {
    std::ofstream os(cfg.out / "config.txt");
    os << config_text;
  }
  artifacts.insert(artifacts.begin(), {"report.json", "config.txt"});
  std::ofstream manifest(cfg.out / "manifest.txt");
  manifest << "config_sha256 " << sha256_hex(config_text) << '\n';
  for (const auto& a : artifacts) manifest << a << '\n';
  return outcome;
}

std::vector<Table1Row> run_reproduce_table1(const std::filesystem::path& out,
                                            std::size_t workers, std::ostream& log) {
  struct Spec {
    const char* weight;
    double lower, upper, gap, fixed_point;
  };
  const Spec specs[] = {{"box", 0.8055809, 0.8055896, 9e-6, 0.8055809},
                        {"gaussian", 0.7152474, 0.7152576, 1.2e-5, 0.7152475}};
  std::vector<Table1Row> rows;
  for (const Spec& s : specs) {
    RunConfig cfg;
    cfg.weight = s.weight;
    cfg.mode = RunMode::paper;
    cfg.method = Method::both;
    cfg.out = out / s.weight;
    cfg.workers = workers;
    RunOutcome r = run_solve(cfg, log);
    rows.push_back({s.weight, r.spectral->lower, r.spectral->upper, r.fixed_point->value, s.lower,
                    s.upper, s.gap, s.fixed_point});
  }
  return rows;
}

void print_table1(std::ostream& os, const std::vector<Table1Row>& rows) {
  os << fmt::format("{:<10} {:>12} {:>12} {:>11} {:>12} | {:>10} {:>10} {:>10}\n", "weight",
                    "lower", "upper", "difference", "fixed point", "dev lower", "dev upper",
                    "dev fp");
  for (const auto& r : rows) {
    os << fmt::format("{:<10} {:>12.7f} {:>12.7f} {:>11.3e} {:>12.7f} | {:>10.2e} {:>10.2e} {:>10.2e}\n",
                      r.weight, r.lower, r.upper, r.upper - r.lower, r.fixed_point,
                      std::abs(r.lower - r.paper_lower), std::abs(r.upper - r.paper_upper),
                      std::abs(r.fixed_point - r.paper_fixed_point));
  }
}

}  // namespace autocorr
