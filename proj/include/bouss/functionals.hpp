#pragma once

#include <array>
#include <limits>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "bouss/dynamics.hpp"
#include "bouss/fields.hpp"

namespace bouss {

struct DiagnosticsRecord {
  double t = 0.0;
  double E_P = 0.0;
  double E_K = 0.0;
  double E_T = 0.0;
  double S = 0.0;
  double grad_u_sq = 0.0;
  double grad_v_sq = 0.0;
  double grad_w_sq = 0.0;
  double d1rho_l2 = 0.0;
  double d1rho_h1 = 0.0;
  double strat_surrogate = 0.0;
  double dist_rearr = 0.0;
  double u_l2 = 0.0;
};

using Series = std::vector<DiagnosticsRecord>;

inline constexpr std::array<std::string_view, 13> kRecordColumns = {
    "t",         "E_P",      "E_K",      "E_T",           "S",          "grad_u_sq", "grad_v_sq",
    "grad_w_sq", "d1rho_l2", "d1rho_h1", "strat_surrogate", "dist_rearr", "u_l2"};

std::array<double, 13> record_values(const DiagnosticsRecord& r);
DiagnosticsRecord record_from_values(const std::array<double, 13>& v);
// Column by name; std::invalid_argument for unknown names.
double record_value(const DiagnosticsRecord& r, std::string_view column);
Eigen::VectorXd column(const Series& s, std::string_view name);

struct Energies {
  double E_P = 0.0;
  double E_K = 0.0;
  double E_T = 0.0;
};

// Quadrature on physical fields. E_P is relative to rho0_star.
Energies energies(const Field& rho, const VelocityField& u, const Profile& rho0_star);

struct Defect {
  VelocityField v;
  VelocityField w;
  double S = 0.0;
  double grad_u_sq = 0.0;
  double grad_v_sq = 0.0;
  double grad_w_sq = 0.0;
};

Defect defect_fields(const Field& rho, const VelocityField& u);

// The record of a simulation state. Kinetic terms use the forms the time
// stepper conserves: -<phi, (D2 - k^2) phi> for energy and the wall-closed
// vorticity for dissipation, so the discrete energy balance closes.
DiagnosticsRecord diagnose_state(const SimState& s, const HydrostaticProfile& profile, const Profile& rho0_star);

double lyapunov_value(const DiagnosticsRecord& r, double C1);
inline constexpr double kNoLyapunovConstant = std::numeric_limits<double>::infinity();
double minimal_lyapunov_C1(const Series& series);
bool lyapunov_nonincreasing(const Series& series, double C1, double rel_slack = 1e-10);

// Cell form: sort by value (descending), stack from the bottom. Ties keep the
// cell with smaller (x2, x1) lower.
struct CellLayer {
  double value;
  double measure;
  double z_lo;
  double z_hi;
  int cell;
};
std::vector<CellLayer> rearrange_cells(const std::vector<double>& values, const std::vector<double>& measures,
                                       const std::vector<double>& x2 = {}, const std::vector<double>& x1 = {},
                                       double width = 1.0);
// sum of value * int_{z_lo}^{z_hi} z dz * width for stacked layers
double stacked_potential(const std::vector<CellLayer>& layers, double width = 1.0);

struct RearrangementResult {
  Profile rho_star;
  // Measure of {rho > rho_star(x2_j)}; equals 2 pi x2_j away from flat spots.
  Eigen::VectorXd layer_measures;
};

// Field form: rho is read as piecewise linear in x2 on each column; its
// distribution function is inverted exactly at the grid heights.
RearrangementResult vertical_rearrangement(const Field& rho);

struct SandwichRatios {
  double lower = 0.0;     // int (f - f*) x2 / ||f - f*||^2
  double upper = 0.0;     // ||f - f*||^2 / int (f - f*) x2
  double gradient = 0.0;  // ||d1 f|| / ||f - f*||
  bool degenerate = false;
  bool large_perturbation = false;
};

SandwichRatios sandwich_ratios(const Field& f, const HydrostaticProfile& profile);

// (2/t) int_{t/2}^t q ds by the trapezoid rule, endpoints interpolated.
double window_average(const Eigen::VectorXd& times, const Eigen::VectorXd& q, double t);
double window_average(const Series& s, std::string_view quantity, double t);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of log residuals
  double t_lo = 0.0;
  double t_hi = 0.0;
  int samples = 0;
  bool short_window = false;  // spans less than a decade
};

SlopeFit decay_slope(const Eigen::VectorXd& times, const Eigen::VectorXd& q, double t_lo, double t_hi);
SlopeFit decay_slope(const Series& s, std::string_view quantity, double t_lo, double t_hi);

struct InstabilityProxies {
  double min_d1rho = 0.0;
  double initial_d1rho = 0.0;
  double cumulative_gradv = 0.0;
  std::vector<double> gradv_increments;  // over consecutive windows of the given length from t = 0
  bool saturating = false;               // increments strictly decreasing
  double lowerbound_growth_k1 = 0.0;     // ratio of ||d1 rho||^2 / ||grad v|| at t_final and t_burn
};

InstabilityProxies instability_proxies(const Series& s, double t_burn = 10.0, double window = 10.0);

// Linear interpolation of a sampled column at t.
double interpolate(const Eigen::VectorXd& times, const Eigen::VectorXd& q, double t);

}  // namespace bouss
