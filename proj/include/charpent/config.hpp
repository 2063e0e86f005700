#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "charpent/maxprin.hpp"
#include "charpent/solver.hpp"
#include "charpent/traces.hpp"

namespace charpent {

struct GridConfig {
  double h = 0.01;
  int quad_order = 7;
  bool operator==(const GridConfig&) const = default;
};

struct ToleranceConfig {
  double check_tol = 1e-10;
  double conclusion_tol = 1e-6;
  bool operator==(const ToleranceConfig&) const = default;
};

struct DataConfig {
  std::string phi = "0", psi = "0", sigma = "0", chi = "0";
  bool operator==(const DataConfig&) const = default;
};

struct Gamma0Config {
  double a = 0.0, b = 1.0;
  bool operator==(const Gamma0Config&) const = default;
};

struct DiskDemoConfig {
  double p = -0.625;
  std::vector<double> radii;  // empty = default 1-10^-k, k=2..6
  bool operator==(const DiskDemoConfig&) const = default;
};

struct BatchConfig {
  int n = 100;
  bool operator==(const BatchConfig&) const = default;
};

/// One JSON document drives every subcommand; sections irrelevant to a
/// subcommand may be omitted. Unknown keys are rejected.
struct RunConfig {
  std::optional<std::array<double, 5>> coefficients;
  std::optional<Gamma0Config> gamma0;
  std::optional<std::array<double, 2>> point_c;
  std::optional<DataConfig> data;
  std::optional<std::string> f;
  GridConfig grid;
  ToleranceConfig tolerances;
  std::uint64_t seed = 42;
  std::optional<DiskDemoConfig> disk_demo;
  std::optional<BatchConfig> batch;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Stable key order; doubles serialized losslessly.
std::string config_to_json_text(const RunConfig& cfg);

/// Failure-dump form of a generated instance; round-trips through
/// parse_config_text.
RunConfig config_from_instance(const GeneratedInstance& gen, double conclusion_tol);

/// Writes via a temp file and rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// 17 significant digits (lossless double round trip).
std::string format_g17(double v);

/// Header x1,x2,u,mask; row-major by x2 then x1; mask is 2 interior,
/// 1 boundary-layer, 0 outside.
void write_solution_csv(const std::filesystem::path& path, const SolutionGrid& grid);

/// Columns r,I,N,panels.
void write_wave_disk_csv(const std::filesystem::path& path, const WaveDiskResult& result);

}  // namespace charpent
