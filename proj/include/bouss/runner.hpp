#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bouss/config.hpp"
#include "bouss/functionals.hpp"
#include "bouss/odecheck.hpp"

namespace bouss {

enum class RunStatus { completed, resolution_stop, divergence, cfl_violation };
std::string to_string(RunStatus s);
// 0 completed, 3 divergence or CFL violation, 4 resolution-monitor stop.
int exit_code(RunStatus s);

struct FitReport {
  bool defined = false;
  std::string reason;  // why the fit is undefined
  SlopeFit fit;
};

struct WindowDecay {
  std::vector<double> times;
  std::vector<double> averages;
  FitReport exponent;
};

struct Analysis {
  DiagnosticsRecord final_record;
  std::map<std::string, FitReport> slopes;  // E_T, dist_rearr, strat_surrogate, dist_plus_u
  double c1_min = 0.0;
  double c1_used = 0.0;
  bool lyapunov_nonincreasing = false;
  // Windowed average of |grad u|^2 + |grad v|^2 + |grad w|^2 at T/4, T/2, T.
  WindowDecay dissipation;
  std::optional<double> energy_residual;  // |E_T(T) + int_0^T |grad u|^2 - E_T(0)| / E_T(0)
  std::optional<InstabilityProxies> proxies;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
};

struct AnalysisParams {
  double fit_t_lo = 25.0;
  double fit_t_hi = 0.0;  // 0 means the last sample
  std::optional<double> c1;
  bool bubble = false;
  double t_burn = 10.0;
  double window = 10.0;
};

AnalysisParams analysis_params(const RunConfig& c);
Analysis analyze(const Series& s, const AnalysisParams& p);

struct RunReport {
  RunConfig config;
  double wall_seconds = 0.0;
  RunStatus status = RunStatus::completed;
  double stop_time = 0.0;
  std::string message;
  bool monotonicity_lost = false;
  double max_resolution_tail = 0.0;
  Analysis analysis;
};

struct RunOptions {
  std::string resume;  // checkpoint path
  std::ostream* log = nullptr;
};

struct RunSetup {
  GridPtr grid;
  HydrostaticProfile profile;
  SimState initial;
  Profile rho0_star;
  bool monotonicity_lost = false;
};

RunSetup setup_run(const RunConfig& c);

// Writes series.csv, checkpoint.bin and report.json under c.out_dir.
RunReport run(const RunConfig& c, const RunOptions& opts = {});
// Rebuilds the analysis from a series CSV without stepping.
Analysis diagnose(const std::string& csv_path, const AnalysisParams& p);

nlohmann::json to_json(const Analysis& a);
nlohmann::json to_json(const RunReport& r);

}  // namespace bouss
