#include "bouss/dynamics.hpp"

#include <cmath>
#include <numbers>

#include "bouss/elliptic.hpp"

namespace bouss {

namespace {

HydrostaticProfile finish_profile(Profile rho_s, Profile drho_s) {
  HydrostaticProfile p{std::move(rho_s), std::move(drho_s), 0.0};
  p.gamma = (-p.drho_s).minCoeff();
  return p;
}

// Centered difference of a k=0 profile at interior nodes.
Profile centered_interior(const Profile& f, double h) {
  Profile d = Profile::Zero(f.size());
  for (Eigen::Index j = 1; j + 1 < f.size(); ++j) d(j) = (f(j + 1) - f(j - 1)) / (2.0 * h);
  return d;
}

void require_finite(const Eigen::MatrixXcd& a, const char* name) {
  if (!a.allFinite()) throw NumericalDivergence(name);
}

}  // namespace

HydrostaticProfile linear_profile(const ChannelGrid& g, double alpha) {
  Profile rho = 1.0 - alpha * g.x2.array();
  return finish_profile(rho, Profile::Constant(g.n2, -alpha));
}

HydrostaticProfile tabulated_profile(const ChannelGrid& g, const Profile& rho_s) {
  if (rho_s.size() != g.n2) throw std::invalid_argument("tabulated_profile: length does not match n2");
  const Eigen::RowVectorXd d = ddx2_lines(rho_s.transpose(), g.dx2);
  return finish_profile(rho_s, d.transpose());
}

HydrostaticProfile analytic_profile(const ChannelGrid& g, const std::function<double(double)>& rho_s,
                                    const std::function<double(double)>& drho_s) {
  Profile r(g.n2), d(g.n2);
  for (int j = 0; j < g.n2; ++j) {
    r(j) = rho_s(g.x2(j));
    d(j) = drho_s(g.x2(j));
  }
  return finish_profile(r, d);
}

SimState state_from_theta(const Field& theta) {
  SimState s;
  s.theta = to_spectral(theta);
  s.phi = SpectralField(theta.grid);
  s.mean_u1 = Profile::Zero(theta.grid->n2);
  return s;
}

InitialData initial_data(InitialKind kind, double eps, const HydrostaticProfile& profile, const GridPtr& grid,
                         const BubbleShape& shape) {
  if (!(eps >= 0.0)) throw std::invalid_argument("initial_data: eps must be >= 0");
  const auto& g = *grid;
  const double pi = std::numbers::pi;
  Field theta(grid);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const double x = g.x1(i), y = g.x2(j);
      const double wall = std::pow(std::sin(pi * y), 4);
      if (kind == InitialKind::stable_perturbation) {
        theta.values(i, j) = eps * std::cos(x) * wall;
      } else {
        const double r2 = (x - pi) * (x - pi) + shape.lambda * (y - 0.5) * (y - 0.5);
        theta.values(i, j) = eps * std::exp(-r2 / (shape.sigma * shape.sigma)) * wall;
      }
    }
  theta.values.col(0).setZero();
  theta.values.col(g.n2 - 1).setZero();
  InitialData out{state_from_theta(theta), false};
  // Strict decrease in x2 along every column is what "monotone" means here.
  for (int i = 0; i < g.n1 && !out.monotonicity_lost; ++i)
    for (int j = 0; j + 1 < g.n2; ++j)
      if (profile.rho_s(j + 1) + theta.values(i, j + 1) >= profile.rho_s(j) + theta.values(i, j)) {
        out.monotonicity_lost = true;
        break;
      }
  return out;
}

VelocityField velocity_from_state(const SimState& s) {
  const auto& g = *s.phi.grid;
  SpectralField u1(s.phi.grid, -ddx2_interior(s.phi.coeffs, g.dx2));
  u1.coeffs.row(0) = s.mean_u1.transpose().cast<cplx>();
  u1.coeffs(0, 0) = u1.coeffs(0, g.n2 - 1) = 0.0;
  SpectralField u2 = ddx1(s.phi);
  u2.coeffs.row(0).setZero();
  return {to_physical(u1), to_physical(u2)};
}

Field density(const SimState& s, const HydrostaticProfile& profile) {
  Field rho = to_physical(s.theta);
  rho.values.rowwise() += profile.rho_s.transpose();
  return rho;
}

Tendencies explicit_tendencies(const SimState& s, const HydrostaticProfile& profile) {
  const auto& grid = s.phi.grid;
  const auto& g = *grid;
  const int n2 = g.n2;
  const double h = g.dx2;
  const double c2 = 1.0 / (h * h);

  // Spectral velocity and vorticity at interior nodes.
  Eigen::MatrixXcd u1 = -ddx2_interior(s.phi.coeffs, h);
  Eigen::MatrixXcd u2 = ddx1(s.phi).coeffs;
  Eigen::MatrixXcd om = Eigen::MatrixXcd::Zero(g.kmax + 1, n2);
  for (int k = 1; k <= g.kmax; ++k) {
    const double k2 = static_cast<double>(k) * k;
    for (int j = 1; j + 1 < n2; ++j)
      om(k, j) = c2 * (s.phi.coeffs(k, j + 1) - 2.0 * s.phi.coeffs(k, j) + s.phi.coeffs(k, j - 1)) - k2 * s.phi.coeffs(k, j);
  }
  u1.row(0) = s.mean_u1.transpose().cast<cplx>();
  u1(0, 0) = u1(0, n2 - 1) = 0.0;
  u2.row(0).setZero();
  om.row(0) = (-centered_interior(s.mean_u1, h)).transpose().cast<cplx>();

  const Eigen::MatrixXd pu1 = inverse_lines(u1, g.n1);
  const Eigen::MatrixXd pu2 = inverse_lines(u2, g.n1);
  const Eigen::MatrixXd pth = inverse_lines(s.theta.coeffs, g.n1);
  const Eigen::MatrixXd pom = inverse_lines(om, g.n1);

  auto spectral = [&](const Eigen::MatrixXd& prod) {
    return dealias(SpectralField(grid, forward_lines(prod, g.kmax))).coeffs;
  };
  // Flux form: u . grad q = d1(u1 q) + d2(u2 q) for solenoidal u.
  auto transport = [&](const Eigen::MatrixXd& q) {
    const SpectralField a = ddx1(SpectralField(grid, spectral(pu1.cwiseProduct(q))));
    return Eigen::MatrixXcd(a.coeffs + ddx2_interior(spectral(pu2.cwiseProduct(q)), h));
  };

  Tendencies out;
  out.theta = -transport(pth);
  out.omega = -transport(pom);
  for (int k = 0; k <= g.kmax; ++k) {
    out.theta.row(k) -= (u2.row(k).array() * profile.drho_s.transpose().array()).matrix();
    out.omega.row(k) -= cplx(0.0, k) * s.theta.coeffs.row(k);
  }
  out.omega.row(0).setZero();
  out.theta.col(0).setZero();
  out.theta.col(n2 - 1).setZero();
  out.omega.col(0).setZero();
  out.omega.col(n2 - 1).setZero();

  const Profile stress = pu1.cwiseProduct(pu2).colwise().mean().transpose();
  out.mean = -centered_interior(stress, h);
  return out;
}

SpectralField rhs_theta(const SimState& s, const HydrostaticProfile& profile) {
  return SpectralField(s.theta.grid, explicit_tendencies(s, profile).theta);
}

SpectralField rhs_vorticity(const SimState& s) {
  // Buoyancy and advection of vorticity do not involve the background profile.
  const auto& g = *s.theta.grid;
  const HydrostaticProfile none{Profile::Zero(g.n2), Profile::Zero(g.n2), 0.0};
  return SpectralField(s.theta.grid, explicit_tendencies(s, none).omega);
}

double max_speed(const SimState& s) {
  const VelocityField u = velocity_from_state(s);
  return std::max(u.u1.values.cwiseAbs().maxCoeff(), u.u2.values.cwiseAbs().maxCoeff());
}

double cfl_dt(const SimState& s, double cfl_target, double dt_max) {
  const auto& g = *s.phi.grid;
  const double dt = cfl_target * std::min(g.dx1(), g.dx2) / std::max(max_speed(s), 1e-12);
  return std::min(dt, dt_max);
}

SimState step(const SimState& s, const StepParams& p, const HydrostaticProfile& profile) {
  if (!(p.dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const auto& grid = s.phi.grid;
  const auto& g = *grid;
  const int n2 = g.n2;
  const double dt = p.dt;

  const double speed = max_speed(s);
  if (dt * speed / std::min(g.dx1(), g.dx2) > p.cfl_target)
    throw CflViolation("step: dt exceeds the advective CFL limit", cfl_dt(s, p.cfl_target, p.dt_max));

  const Tendencies now = explicit_tendencies(s, profile);
  Tendencies ex = now;
  if (s.history.valid) {
    ex.theta = 1.5 * now.theta - 0.5 * s.history.theta;
    ex.omega = 1.5 * now.omega - 0.5 * s.history.omega;
    ex.mean = 1.5 * now.mean - 0.5 * s.history.mean;
  }

  SimState out;
  out.theta = SpectralField(grid, s.theta.coeffs + dt * ex.theta);
  out.phi = SpectralField(grid);
  for (int k = 1; k <= g.kmax; ++k) {
    const Eigen::VectorXcd phi = interior_of(s.phi.coeffs.row(k).transpose());
    const Eigen::VectorXcd lap = laplacian_matrix(n2, k).apply(phi);
    const Eigen::VectorXcd bil = bilaplacian_matrix(n2, k).apply(phi);
    const Eigen::VectorXcd rhs = lap + 0.5 * dt * bil + dt * interior_of(ex.omega.row(k).transpose());
    const auto op = banded_operator(OperatorKind::crank_nicolson, n2, k, dt);
    out.phi.coeffs.row(k) = with_walls(op->lu.solve(-rhs)).transpose();
  }
  Profile mrhs = s.mean_u1 + dt * ex.mean;
  for (int j = 1; j + 1 < n2; ++j)
    mrhs(j) += 0.5 * dt * (s.mean_u1(j + 1) - 2.0 * s.mean_u1(j) + s.mean_u1(j - 1)) / (g.dx2 * g.dx2);
  out.mean_u1 = solve_helmholtz(0, 0.5 * dt, mrhs, g.dx2);

  out.history = {true, now.theta, now.omega, now.mean};
  out.t = s.t + dt;
  out.step = s.step + 1;

  require_finite(out.theta.coeffs, "theta");
  require_finite(out.phi.coeffs, "phi");
  if (!out.mean_u1.allFinite()) throw NumericalDivergence("mean_u1");
  return out;
}

double resolution_tail(const SimState& s) {
  const auto& g = *s.theta.grid;
  const Eigen::VectorXd w = g.x2_weights();
  const int cut = (2 * g.kmax) / 3;
  double tail = 0.0, total = 0.0;
  for (int k = 0; k <= g.kmax; ++k) {
    const double e = (k == 0 ? 1.0 : 2.0) * s.theta.coeffs.row(k).cwiseAbs2().dot(w.transpose());
    total += e;
    if (k > cut) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace bouss
