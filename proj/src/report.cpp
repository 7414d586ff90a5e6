#include "autocorr/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace autocorr {

using Json = nlohmann::ordered_json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void emit(std::string& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        emit(out, it.value(), indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        emit(out, v, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_real(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

std::string to_json_text(const Json& j) {
  std::string out;
  emit(out, j, 0);
  out += "\n";
  return out;
}

StepFunction normalize_l12(const StepFunction& f) {
  StepFunction out = f;
  const StepNorms n = norms(f);
  const double prod = n.l1 * n.l2;
  if (!(prod > 0.0)) return out;
  const double s = 1.0 / std::sqrt(prod);
  for (double& v : out.values) v *= s;
  return out;
}

void write_extremizer(const std::filesystem::path& path, const StepFunction& f,
                      const ExtremizerHeader& header) {
  const StepFunction g = normalize_l12(f);
  auto os = open_out(path);
  os << "# " << header.label << "\n";
  os << "# delta = " << format_real(g.delta) << "\n";
  os << "# radius = " << format_real(g.radius) << "\n";
  os << "# lambda = " << format_real(header.lambda) << "\n";
  os << "# normalization: ||f||_1 ||f||_2 = 1\n";
  os << "# cell_midpoint value\n";
  for (std::size_t i = 0; i < g.size(); ++i)
    os << format_real(g.cell_midpoint(i)) << ' ' << format_real(g.values[i]) << '\n';
}

StepFunction read_extremizer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  StepFunction f;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream h(line.substr(1));
      std::string key, eq;
      double value = 0.0;
      if (h >> key >> eq >> value && eq == "=") {
        if (key == "delta") f.delta = value;
        if (key == "radius") f.radius = value;
      }
      continue;
    }
    std::istringstream row(line);
    double x = 0.0, v = 0.0;
    if (!(row >> x >> v)) throw std::runtime_error("malformed extremizer row: " + line);
    f.values.push_back(v);
  }
  if (f.size() != StepFunction::cell_count(f.delta, f.radius))
    throw std::runtime_error("extremizer file row count does not match its header");
  return f;
}

void write_per_lambda_table(const std::filesystem::path& path, const BoundsReport& rep) {
  auto os = open_out(path);
  os << "# lambda pass c_lambda_delta mu residual discretization grid_slack upper cells "
        "feasible converged near_degenerate iterations covers\n";
  for (const auto& p : rep.per_lambda) {
    os << format_real(p.lambda) << ' ' << p.pass << ' ' << format_real(p.c) << ' '
       << format_real(p.mu) << ' ' << format_real(p.residual) << ' '
       << format_real(p.discretization) << ' ' << format_real(p.grid_slack) << ' '
       << format_real(p.upper) << ' ' << p.cells << ' ' << int(p.feasible) << ' '
       << int(p.converged) << ' ' << int(p.near_degenerate) << ' ' << p.iterations << ' '
       << int(p.covers) << '\n';
  }
}

void write_scan_table(const std::filesystem::path& path, const BoundsReport& rep) {
  auto os = open_out(path);
  os << "# lambda k mu_k feasible iterations converged\n";
  for (const auto& p : rep.per_lambda)
    for (const auto& r : p.scan)
      os << format_real(p.lambda) << ' ' << r.cells << ' ' << format_real(r.mu) << ' '
         << int(r.feasible) << ' ' << r.iterations << ' ' << int(r.converged) << '\n';
}

void write_trace(const std::filesystem::path& path, const FixedPointResult& fp) {
  auto os = open_out(path);
  os << "# iteration value sup_change\n";
  for (const auto& r : fp.trace)
    os << r.iteration << ' ' << format_real(r.value) << ' ' << format_real(r.sup_change) << '\n';
}

void write_kernel_dump(std::ostream& os, const DiscretizedKernel& kernel) {
  os << "# k k*delta w~(k*delta)\n";
  for (std::size_t k = 0; k < kernel.n(); ++k)
    os << k << ' ' << format_real(static_cast<double>(k) * kernel.delta) << ' '
       << format_real(kernel.values[k]) << '\n';
}

Json spectral_json(const BoundsReport& rep, const ReportPaths& paths) {
  Json j;
  j["lower"] = rep.lower;
  j["upper"] = rep.upper;
  j["gap"] = rep.upper - rep.lower;
  j["lambda_star"] = rep.lambda_star;
  j["lambda_upper"] = rep.lambda_upper;
  j["delta"] = rep.delta;
  j["lambda_step"] = rep.lambda_step;
  j["lambda_range"] = Json::array({rep.lambda_lo, rep.lambda_hi});
  j["radius"] = rep.radius;
  j["radius_bound"] = rep.radius_bound;
  j["radius_mode"] = rep.radius_mode == RadiusMode::fine ? "fine" : "coarse";
  j["weight"] = rep.weight;
  j["c_lb"] = rep.c_lb;
  j["c_lb_source"] = rep.c_lb_source;
  j["per_lambda_table"] = paths.per_lambda;
  j["k_scan_table"] = paths.scan;
  j["extremizer"] = paths.extremizer;
  j["extremizer_cells"] = rep.extremizer_cells;
  j["extremizer_l1_over_l2"] = rep.l1_over_l2;
  j["error_terms"] = {{"discretization", rep.error_terms.discretization},
                      {"lambda_grid", rep.error_terms.lambda_grid},
                      {"eigen_residual", rep.error_terms.eigen_residual},
                      {"radius_note", rep.error_terms.radius_note},
                      {"rounding", "floating-point rounding is not bounded"}};
  std::size_t coarse = 0, refined = 0;
  for (const auto& p : rep.per_lambda) (p.pass == 0 ? coarse : refined)++;
  j["lambda_points"] = {{"coarse", coarse}, {"refined", refined}};
  j["infeasible_points"] = rep.infeasible_points;
  j["unconverged_points"] = rep.unconverged_points;
  j["near_degenerate_points"] = rep.degenerate_points;
  return j;
}

Json fixed_point_json(const FixedPointResult& fp, const std::string& trace_path,
                      const std::string& extremizer_path) {
  Json j;
  j["value"] = fp.value;
  j["iterations"] = fp.iterations;
  j["converged"] = fp.converged;
  j["last_delta"] = fp.last_delta;
  j["trace"] = trace_path;
  j["extremizer"] = extremizer_path;
  return j;
}

}  // namespace autocorr
