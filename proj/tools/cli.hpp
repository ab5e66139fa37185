#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dopmeter/analysis.hpp"

namespace dopmeter::cli {

enum class OutputFormat { Csv, Json };

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kConfigError = 2,
  kDomainError = 3,
};

/// Everything a command needs. Units follow the field suffixes; the JSON
/// config file uses the same names (schema "dopmeter-run/1").
struct RunConfig {
  std::filesystem::path material;  // empty: <data dir>/ktp.json
  double lambda1_nm = 1542.0;
  double lambda2_nm = 1560.0;
  std::optional<double> lambda2_min_nm;  // empty: lambda1_nm
  double lambda2_max_nm = 1560.0;
  double lambda2_step_nm = 1.0;
  double length_mm = 3.0;

  std::optional<double> alpha;  // derived from phase matching when empty
  double crystal2_rot_err_deg = 0.0;
  double waveplate_axis_err_deg = 0.0;
  double waveplate_retardance_deg = 180.0;
  double polarizer_angle_deg = 45.0;
  double visibility = 0.9;
  double count_scale = 2000.0;
  double dark_rate = 10.0;
  double snr_threshold = 1.0;

  std::vector<double> theta_deg{0.0, 22.5, 45.0, 67.5, 90.0};
  std::vector<double> phi_deg{-90, -75, -60, -45, -30, -15, 0, 15, 30, 45, 60, 75, 90};
  double integration_s = 1.0;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  std::filesystem::path input;  // fit
  std::string model = "sin2";   // fit
  std::optional<OutputFormat> format;  // empty: JSON for regimes, CSV otherwise
  std::filesystem::path out;    // empty: stdout

  /// Throws InvalidArgument.
  void validate() const;
  std::vector<double> lambda2_grid_nm() const;
  InstrumentConfig instrument(const Material& m) const;
};

/// Applies the fields present in a JSON config document on top of `base`.
RunConfig apply_config_json(RunConfig base, const std::string& json_text);
RunConfig load_config_file(RunConfig base, const std::filesystem::path& path);

Material load_material_for(const RunConfig& cfg);

void cmd_pm_curve(const RunConfig& cfg, std::ostream& out);
void cmd_alpha_curve(const RunConfig& cfg, std::ostream& out);
void cmd_sweep(const RunConfig& cfg, std::ostream& out);
void cmd_sensitivity(const RunConfig& cfg, std::ostream& out);
void cmd_fit(const RunConfig& cfg, std::ostream& out);
void cmd_regimes(const RunConfig& cfg, std::ostream& out);

/// Phi values and per-phi means from a sweep CSV/JSON or a plain
/// `phi_deg,<value>` CSV. Rows sharing a phi are averaged.
struct PhiSeries {
  std::vector<double> phi;  // rad
  std::vector<double> y;
};
PhiSeries read_phi_series(const std::filesystem::path& path);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dopmeter::cli
