#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "bouss/fields.hpp"
#include "bouss/grid.hpp"

namespace bouss {

struct HydrostaticProfile {
  Profile rho_s;
  Profile drho_s;
  double gamma = 0.0;  // min of -drho_s
};

// rho_s = 1 - alpha x2
HydrostaticProfile linear_profile(const ChannelGrid& g, double alpha);
// Derivative taken with ddx2 unless supplied.
HydrostaticProfile tabulated_profile(const ChannelGrid& g, const Profile& rho_s);
HydrostaticProfile analytic_profile(const ChannelGrid& g, const std::function<double(double)>& rho_s,
                                    const std::function<double(double)>& drho_s);

// Previous explicit tendencies, kept for the two-step Adams-Bashforth update.
struct History {
  bool valid = false;
  Eigen::MatrixXcd theta;
  Eigen::MatrixXcd omega;
  Profile mean;
};

struct SimState {
  double t = 0.0;
  std::int64_t step = 0;
  SpectralField theta;  // rho - rho_s
  SpectralField phi;    // u = grad^perp phi for k >= 1; row 0 unused
  Profile mean_u1;      // x1-mean of u1
  History history;
};

struct StepParams {
  double dt = 1e-2;
  double t_final = 1.0;
  double cfl_target = 0.5;
  int output_every = 1;
  double dt_max = 1e-2;
};

enum class InitialKind { stable_perturbation, bubble };

struct BubbleShape {
  double sigma = 0.15;
  double lambda = 4.0;
};

struct InitialData {
  SimState state;
  bool monotonicity_lost = false;
};

InitialData initial_data(InitialKind kind, double eps, const HydrostaticProfile& profile, const GridPtr& grid,
                         const BubbleShape& shape = {});
// Rest state carrying the given density perturbation.
SimState state_from_theta(const Field& theta);

class CflViolation : public std::runtime_error {
 public:
  CflViolation(const std::string& msg, double suggested) : std::runtime_error(msg), suggested_dt(suggested) {}
  double suggested_dt;
};

class NumericalDivergence : public std::runtime_error {
 public:
  explicit NumericalDivergence(const std::string& name)
      : std::runtime_error("non-finite values in " + name), field(name) {}
  std::string field;
};

VelocityField velocity_from_state(const SimState& s);
Field density(const SimState& s, const HydrostaticProfile& profile);

SpectralField rhs_theta(const SimState& s, const HydrostaticProfile& profile);
SpectralField rhs_vorticity(const SimState& s);

struct Tendencies {
  Eigen::MatrixXcd theta;
  Eigen::MatrixXcd omega;
  Profile mean;
};

// All explicit tendencies at interior nodes; wall rows are zero.
Tendencies explicit_tendencies(const SimState& s, const HydrostaticProfile& profile);

double max_speed(const SimState& s);
double cfl_dt(const SimState& s, double cfl_target, double dt_max = 1e-2);

SimState step(const SimState& s, const StepParams& p, const HydrostaticProfile& profile);

// Fraction of the x1-spectral energy of theta above k = 2 kmax / 3.
double resolution_tail(const SimState& s);
inline constexpr double kResolutionTailLimit = 1e-3;

}  // namespace bouss
