#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "autocorr/certify.hpp"
#include "autocorr/fixedpoint.hpp"
#include "autocorr/stepspace.hpp"

namespace autocorr {

/// %.17g
std::string format_real(double x);

/// Serializes like nlohmann::ordered_json::dump(2) but prints every floating-point
/// number with 17 significant digits.
std::string to_json_text(const nlohmann::ordered_json& j);

/// Scales f to ||f||_1 ||f||_2 = 1.
StepFunction normalize_l12(const StepFunction& f);

struct ExtremizerHeader {
  std::string label;
  double lambda = 0.0;  // 0 when not attached to a lambda (fixed point)
};

/// Comment header with delta, radius, lambda and the normalization, then one
/// (cell_midpoint, value) row per cell, normalized to ||f||_1 ||f||_2 = 1.
void write_extremizer(const std::filesystem::path& path, const StepFunction& f,
                      const ExtremizerHeader& header);
StepFunction read_extremizer(const std::filesystem::path& path);

void write_per_lambda_table(const std::filesystem::path& path, const BoundsReport& rep);
/// (lambda, k, mu_k, feasible, iterations) rows for every block solved.
void write_scan_table(const std::filesystem::path& path, const BoundsReport& rep);
void write_trace(const std::filesystem::path& path, const FixedPointResult& fp);
/// (k, k delta, w~(k delta)) rows.
void write_kernel_dump(std::ostream& os, const DiscretizedKernel& kernel);

struct ReportPaths {
  std::string per_lambda;
  std::string scan;
  std::string extremizer;
};

nlohmann::ordered_json spectral_json(const BoundsReport& rep, const ReportPaths& paths);
nlohmann::ordered_json fixed_point_json(const FixedPointResult& fp, const std::string& trace_path,
                                const std::string& extremizer_path);

}  // namespace autocorr
