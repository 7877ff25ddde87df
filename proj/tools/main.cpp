#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bouss/config.hpp"
#include "bouss/elliptic.hpp"
#include "bouss/io.hpp"
#include "bouss/odecheck.hpp"
#include "bouss/runner.hpp"

namespace fs = std::filesystem;
using namespace bouss;

namespace {

constexpr int kConfigError = 2;

void emit(const nlohmann::json& j, const std::string& out_dir, const std::string& name, bool quiet) {
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream((fs::path(out_dir) / name).string()) << j.dump(2) << "\n";
  }
  if (!quiet) std::cout << j.dump(2) << "\n";
}

int cmd_run(const std::string& config, const std::string& out, const std::string& resume, bool quiet) {
  RunConfig c = load_config(config);
  if (!out.empty()) c.out_dir = out;
  RunOptions o;
  o.resume = resume;
  if (!quiet) o.log = &std::cerr;
  const RunReport r = run(c, o);
  if (!quiet) {
    std::cout << "status: " << to_string(r.status) << " at t = " << r.stop_time << "\n";
    if (!r.message.empty()) std::cout << r.message << "\n";
    std::cout << "report: " << (fs::path(c.out_dir) / "report.json").string() << "\n";
  }
  return exit_code(r.status);
}

int cmd_diagnose(const std::string& csv, const std::string& config, const std::string& out, bool quiet) {
  AnalysisParams p;
  if (!config.empty()) p = analysis_params(load_config(config));
  emit(to_json(diagnose(csv, p)), out, "diagnose.json", quiet);
  return 0;
}

int cmd_stokes(const std::string& input, const std::string& out, bool quiet) {
  const Field rho = read_field(input);
  const StokesSolution s = solve_stokes_buoyancy(rho);
  const VelocityField res = stokes_residual(s, rho);
  if (!out.empty()) {
    fs::create_directories(out);
    write_field((fs::path(out) / "v1.txt").string(), s.v.u1);
    write_field((fs::path(out) / "v2.txt").string(), s.v.u2);
    write_field((fs::path(out) / "psi.txt").string(), s.psi);
    write_field((fs::path(out) / "q.txt").string(), s.q);
  }
  const nlohmann::json j = {{"v_l2", l2_norm(s.v)},
                            {"rho_l2", l2_norm(rho)},
                            {"residual_l2", l2_norm(res)},
                            {"residual_max", std::max(max_abs(res.u1), max_abs(res.u2))},
                            {"strat_surrogate", stratification_surrogate(rho)}};
  emit(j, out, "stokes.json", quiet);
  return 0;
}

int cmd_rearrange(const std::string& input, const std::string& out, bool quiet) {
  const Field rho = read_field(input);
  const RearrangementResult r = vertical_rearrangement(rho);
  if (!out.empty()) {
    fs::create_directories(out);
    write_profile((fs::path(out) / "rho_star.txt").string(), *rho.grid, r.rho_star);
  }
  if (!quiet)
    for (Eigen::Index j = 0; j < r.rho_star.size(); ++j)
      std::cout << rho.grid->x2(j) << " " << r.rho_star(j) << "\n";
  return 0;
}

int cmd_verify_ode(int density, bool quiet) {
  bool ok = true;
  for (const auto& c : synthetic_cases()) {
    const Verdict v = c.run(density);
    const bool good = c.positive ? v.pass() : !v.conclusion_holds;
    ok = ok && good;
    if (!quiet)
      std::cout << (good ? "ok   " : "BAD  ") << (c.positive ? "positive " : "negative ") << c.name << ": "
                << format_verdict(v) << "\n";
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscous Boussinesq channel toolkit"};
  app.require_subcommand(1);
  std::string config, out, resume, input;
  bool quiet = false;
  int density = 1;

  auto* run_cmd = app.add_subcommand("run", "Time-step a configured scenario");
  run_cmd->add_option("--config", config, "Scenario config file")->required();
  run_cmd->add_option("--out", out, "Output directory (overrides [output] dir)");
  run_cmd->add_option("--resume", resume, "Checkpoint to continue from");
  run_cmd->add_flag("--quiet", quiet);

  auto* diag_cmd = app.add_subcommand("diagnose", "Recompute the analysis from a series CSV");
  diag_cmd->add_option("series", input, "series.csv")->required();
  diag_cmd->add_option("--config", config, "Config supplying the analysis settings");
  diag_cmd->add_option("--out", out, "Directory for diagnose.json");
  diag_cmd->add_flag("--quiet", quiet);

  auto* stokes_cmd = app.add_subcommand("stokes-once", "Solve the buoyancy-driven Stokes problem for a density file");
  stokes_cmd->add_option("density", input, "Field file")->required();
  stokes_cmd->add_option("--out", out, "Directory for v1, v2, psi, q");
  stokes_cmd->add_flag("--quiet", quiet);

  auto* rearr_cmd = app.add_subcommand("rearrange-once", "Vertical decreasing rearrangement of a density file");
  rearr_cmd->add_option("density", input, "Field file")->required();
  rearr_cmd->add_option("--out", out, "Directory for rho_star.txt");
  rearr_cmd->add_flag("--quiet", quiet);

  auto* ode_cmd = app.add_subcommand("verify-ode", "Run the synthetic ODE lemma suites");
  ode_cmd->add_option("--density", density, "Sampling refinement factor")->check(CLI::PositiveNumber);
  ode_cmd->add_flag("--quiet", quiet);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(config, out, resume, quiet);
    if (*diag_cmd) return cmd_diagnose(input, config, out, quiet);
    if (*stokes_cmd) return cmd_stokes(input, out, quiet);
    if (*rearr_cmd) return cmd_rearrange(input, out, quiet);
    if (*ode_cmd) return cmd_verify_ode(density, quiet);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalDivergence& e) {
    std::cerr << "numerical divergence: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
