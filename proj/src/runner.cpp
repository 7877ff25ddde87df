#include "bouss/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "bouss/io.hpp"

namespace bouss {

namespace {

using nlohmann::json;

FitReport fit(const Eigen::VectorXd& t, const Eigen::VectorXd& q, double lo, double hi) {
  FitReport r;
  try {
    r.fit = decay_slope(t, q, lo, hi);
    r.defined = std::isfinite(r.fit.slope);
    if (!r.defined) r.reason = "non-finite slope";
  } catch (const std::exception& e) {
    r.reason = e.what();
  }
  return r;
}

Field random_perturbation(const GridPtr& grid, double eps, std::uint64_t seed) {
  const auto& g = *grid;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  const int kk = std::min(g.kmax, 4);
  std::vector<std::array<double, 4>> c(kk + 1);
  for (auto& a : c)
    for (double& x : a) x = n(rng);
  Field f(grid);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const double x = g.x1(i), y = g.x2(j);
      double v = 0.0;
      for (int k = 1; k <= kk; ++k) v += (c[k][0] * std::cos(k * x) + c[k][1] * std::sin(k * x)) * (c[k][2] + c[k][3] * y);
      f.values(i, j) = v * std::pow(std::sin(std::numbers::pi * y), 4);
    }
  f.values.col(0).setZero();
  f.values.col(g.n2 - 1).setZero();
  const double m = f.values.cwiseAbs().maxCoeff();
  if (m > 0.0) f.values *= eps / m;
  return f;
}

bool strictly_decreasing_columns(const Field& rho) {
  for (Eigen::Index i = 0; i < rho.values.rows(); ++i)
    for (Eigen::Index j = 0; j + 1 < rho.values.cols(); ++j)
      if (rho.values(i, j + 1) >= rho.values(i, j)) return false;
  return true;
}

json fit_json(const FitReport& f) {
  if (!f.defined) return {{"defined", false}, {"reason", f.reason}};
  return {{"defined", true},           {"slope", f.fit.slope},   {"intercept", f.fit.intercept},
          {"residual", f.fit.residual}, {"t_lo", f.fit.t_lo},     {"t_hi", f.fit.t_hi},
          {"samples", f.fit.samples},   {"short_window", f.fit.short_window}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::resolution_stop: return "resolution-monitor-stop";
    case RunStatus::divergence: return "numerical-divergence";
    case RunStatus::cfl_violation: return "cfl-violation";
  }
  return "?";
}

int exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return 0;
    case RunStatus::resolution_stop: return 4;
    default: return 3;
  }
}

AnalysisParams analysis_params(const RunConfig& c) {
  AnalysisParams p;
  p.fit_t_lo = c.fit_t_lo;
  p.fit_t_hi = c.fit_t_hi;
  p.c1 = c.c1;
  p.bubble = c.scenario == Scenario::bubble;
  p.t_burn = c.t_burn;
  p.window = c.window;
  return p;
}

Analysis analyze(const Series& s, const AnalysisParams& p) {
  if (s.empty()) throw std::invalid_argument("analyze: empty series");
  Analysis a;
  a.final_record = s.back();
  const Eigen::VectorXd t = column(s, "t");
  const double T = t(t.size() - 1);
  const double hi = p.fit_t_hi > 0.0 ? p.fit_t_hi : T;

  for (const char* name : {"E_T", "dist_rearr", "strat_surrogate"}) a.slopes[name] = fit(t, column(s, name), p.fit_t_lo, hi);
  a.slopes["dist_plus_u"] = fit(t, column(s, "dist_rearr") + column(s, "u_l2"), p.fit_t_lo, hi);

  if (s.size() >= 3) {
    a.c1_min = minimal_lyapunov_C1(s);
    a.c1_used = p.c1 ? *p.c1 : a.c1_min;
    a.lyapunov_nonincreasing = std::isfinite(a.c1_used) && lyapunov_nonincreasing(s, a.c1_used);
  } else {
    a.c1_min = a.c1_used = kNoLyapunovConstant;
    a.notes.push_back("fewer than three samples; no Lyapunov constant");
  }

  const Eigen::VectorXd D = column(s, "grad_u_sq") + column(s, "grad_v_sq") + column(s, "grad_w_sq");
  try {
    Eigen::VectorXd wt(3), wv(3);
    for (int i = 0; i < 3; ++i) {
      wt(i) = T / std::pow(2.0, 2 - i);
      wv(i) = window_average(t, D, wt(i));
      a.dissipation.times.push_back(wt(i));
      a.dissipation.averages.push_back(wv(i));
    }
    a.dissipation.exponent = fit(wt, wv, wt(0), wt(2));
  } catch (const std::exception& e) {
    a.dissipation.exponent.reason = e.what();
  }

  if (s.front().E_T > 0.0 && s.size() >= 2) {
    double integral = 0.0;
    for (size_t n = 1; n < s.size(); ++n) integral += 0.5 * (s[n].t - s[n - 1].t) * (s[n].grad_u_sq + s[n - 1].grad_u_sq);
    a.energy_residual = std::abs(s.back().E_T + integral - s.front().E_T) / s.front().E_T;
  }

  if (p.bubble) {
    try {
      a.proxies = instability_proxies(s, p.t_burn, p.window);
    } catch (const std::exception& e) {
      a.notes.push_back(std::string("instability proxies unavailable: ") + e.what());
    }
  }

  try {
    SampledTrajectory traj{t, {{"f", D}}};
    const double E = minimal_window_bound(traj, "f", 3.0);
    a.verdicts.push_back(check_lemma_A4(traj, E, 3.0, 0.5));
  } catch (const std::exception& e) {
    a.notes.push_back(std::string("A4 check skipped: ") + e.what());
  }
  return a;
}

RunSetup setup_run(const RunConfig& c) {
  RunSetup r;
  try {
    r.grid = make_grid(c.kmax, c.n2);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.profile == ProfileKind::linear) {
    r.profile = linear_profile(*r.grid, c.alpha);
  } else {
    const Profile p = read_profile(c.profile_file);
    if (p.size() != c.n2) throw ConfigError("profile file has " + std::to_string(p.size()) + " values, n2 = " + std::to_string(c.n2));
    r.profile = tabulated_profile(*r.grid, p);
  }

  switch (c.scenario) {
    case Scenario::stable:
    case Scenario::bubble: {
      const auto kind = c.scenario == Scenario::stable ? InitialKind::stable_perturbation : InitialKind::bubble;
      InitialData d = initial_data(kind, c.eps, r.profile, r.grid, c.bubble);
      r.initial = std::move(d.state);
      r.monotonicity_lost = d.monotonicity_lost;
      break;
    }
    case Scenario::custom: {
      Field theta;
      if (!c.initial_file.empty()) {
        theta = read_field(c.initial_file);
        if (theta.grid->kmax != c.kmax || theta.grid->n2 != c.n2)
          throw ConfigError("initial field grid does not match [grid]");
        theta = Field(r.grid, theta.values);
      } else {
        theta = random_perturbation(r.grid, c.eps, c.seed);
      }
      r.initial = state_from_theta(theta);
      r.monotonicity_lost = !strictly_decreasing_columns(density(r.initial, r.profile));
      break;
    }
  }
  r.rho0_star = vertical_rearrangement(density(r.initial, r.profile)).rho_star;
  return r;
}

RunReport run(const RunConfig& c, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  RunSetup setup = setup_run(c);
  RunReport report;
  report.config = c;
  report.monotonicity_lost = setup.monotonicity_lost;

  namespace fs = std::filesystem;
  fs::create_directories(c.out_dir);
  const std::string csv_path = (fs::path(c.out_dir) / "series.csv").string();
  const std::string ckpt_path = (fs::path(c.out_dir) / "checkpoint.bin").string();

  SimState s = setup.initial;
  Profile rho0_star = setup.rho0_star;
  Series series;
  if (!opts.resume.empty()) {
    Checkpoint ck = load_checkpoint(opts.resume);
    if (ck.state.theta.grid->kmax != c.kmax || ck.state.theta.grid->n2 != c.n2)
      throw ConfigError("checkpoint grid does not match [grid]");
    // Reattach to this run's grid object so all fields share one pointer.
    s = std::move(ck.state);
    s.theta.grid = s.phi.grid = setup.grid;
    rho0_star = std::move(ck.rho0_star);
    if (fs::exists(csv_path))
      for (const auto& r : read_series_csv(csv_path))
        if (r.t < s.t || (r.t == s.t && s.step % c.output_every == 0)) series.push_back(r);
  } else {
    series.push_back(diagnose_state(s, setup.profile, rho0_star));
  }

  StepParams sp;
  sp.dt = c.dt;
  sp.t_final = c.t_final;
  sp.cfl_target = c.cfl_target;
  sp.output_every = c.output_every;
  sp.dt_max = c.dt;

  const std::int64_t total = c.total_steps();
  report.max_resolution_tail = resolution_tail(s);
  auto log_line = [&](const DiagnosticsRecord& r) {
    if (opts.log)
      *opts.log << "t=" << r.t << " E_T=" << r.E_T << " S=" << r.S << " |d1 rho|=" << r.d1rho_l2 << "\n";
  };

  try {
    while (s.step < total) {
      s = step(s, sp, setup.profile);
      const bool last = s.step == total;
      if (s.step % c.output_every == 0 || last) {
        series.push_back(diagnose_state(s, setup.profile, rho0_star));
        const double tail = resolution_tail(s);
        report.max_resolution_tail = std::max(report.max_resolution_tail, tail);
        if (opts.log && (s.step % std::max<std::int64_t>(1, total / 20) < c.output_every || last)) log_line(series.back());
        if (tail > kResolutionTailLimit) {
          report.status = RunStatus::resolution_stop;
          report.stop_time = s.t;
          report.message = "spectral tail " + std::to_string(tail) + " exceeds the resolution limit";
          break;
        }
      }
      if (c.checkpoint_every > 0 && s.step % c.checkpoint_every == 0 && !last) {
        save_checkpoint(ckpt_path, s, rho0_star);
        write_series_csv(csv_path, series);
      }
    }
  } catch (const CflViolation& e) {
    report.status = RunStatus::cfl_violation;
    report.stop_time = s.t;
    report.message = std::string(e.what()) + "; suggested dt " + std::to_string(e.suggested_dt);
  } catch (const NumericalDivergence& e) {
    report.status = RunStatus::divergence;
    report.stop_time = s.t;
    report.message = e.what();
  }
  if (report.status == RunStatus::completed) report.stop_time = s.t;

  save_checkpoint(ckpt_path, s, rho0_star);
  write_series_csv(csv_path, series);
  // Analysis runs on the series as written so that diagnose reproduces it.
  report.analysis = analyze(read_series_csv(csv_path), analysis_params(c));
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream((fs::path(c.out_dir) / "report.json").string()) << to_json(report).dump(2) << "\n";
  return report;
}

Analysis diagnose(const std::string& csv_path, const AnalysisParams& p) { return analyze(read_series_csv(csv_path), p); }

json to_json(const Analysis& a) {
  json j;
  json rec;
  const auto vals = record_values(a.final_record);
  for (size_t c = 0; c < vals.size(); ++c) rec[std::string(kRecordColumns[c])] = vals[c];
  j["final_record"] = rec;
  for (const auto& [name, f] : a.slopes) j["slopes"][name] = fit_json(f);
  j["lyapunov"] = {{"c1_min", finite_or_null(a.c1_min)},
                   {"c1_used", finite_or_null(a.c1_used)},
                   {"nonincreasing", a.lyapunov_nonincreasing}};
  j["dissipation_window"] = {{"times", a.dissipation.times},
                             {"averages", a.dissipation.averages},
                             {"exponent", fit_json(a.dissipation.exponent)}};
  j["energy_residual"] = a.energy_residual ? json(*a.energy_residual) : json(nullptr);
  if (a.proxies) {
    const auto& p = *a.proxies;
    j["instability"] = {{"min_d1rho", p.min_d1rho},
                        {"initial_d1rho", p.initial_d1rho},
                        {"cumulative_gradv", p.cumulative_gradv},
                        {"gradv_increments", p.gradv_increments},
                        {"saturating", p.saturating},
                        {"lowerbound_growth_k1", p.lowerbound_growth_k1}};
  }
  j["ode_verdicts"] = json::array();
  for (const auto& v : a.verdicts)
    j["ode_verdicts"].push_back({{"lemma", v.name},
                                 {"hypothesis_holds", v.hypothesis_holds},
                                 {"hypothesis_detail", v.hypothesis_detail},
                                 {"conclusion_holds", v.conclusion_holds},
                                 {"minimal_constant", finite_or_null(v.minimal_constant)},
                                 {"constant", v.constant},
                                 {"pass", v.pass()}});
  j["notes"] = a.notes;
  return j;
}

json to_json(const RunReport& r) {
  json j;
  j["config"] = config_to_ini(r.config);
  j["wall_seconds"] = r.wall_seconds;
  j["status"] = to_string(r.status);
  j["stop_time"] = r.stop_time;
  j["message"] = r.message;
  j["monotonicity_lost"] = r.monotonicity_lost;
  j["resolution"] = {{"max_tail", r.max_resolution_tail}, {"limit", kResolutionTailLimit}};
  j["analysis"] = to_json(r.analysis);
  return j;
}

}  // namespace bouss
