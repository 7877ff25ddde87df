#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "bouss/elliptic.hpp"
#include "support.hpp"

using namespace bouss;
using fx::kPi;

namespace {

// Delta^2 of cos(x1) sin^2(pi x2), differentiated by hand:
// sin^2 = (1 - cos 2 pi y)/2, and with k = 1 the operator is (d^2 - 1)^2.
double manufactured_rhs(double x, double y) {
  const double a = 2 * kPi;
  const double c = std::cos(a * y);
  // (d^2 - 1)^2 [1/2] = 1/2 ; (d^2 - 1)^2 [-c/2] = -(a^2 + 1)^2 c / 2
  return std::cos(x) * (0.5 - 0.5 * std::pow(a * a + 1.0, 2) * c);
}

Field bubble_density(const GridPtr& g, double eps) {
  return fx::sample(g, [eps](double x, double y) {
    const double s = 0.15;
    const double r2 = (x - kPi) * (x - kPi) + 4.0 * (y - 0.5) * (y - 0.5);
    return 1.0 - y + eps * std::exp(-r2 / (s * s)) * std::pow(std::sin(kPi * y), 4);
  });
}

}  // namespace

TEST(BandedLU, MatchesDenseSolve) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PentaMatrix<double> a(12);
  for (int i = 0; i < 12; ++i)
    for (int d = -2; d <= 2; ++d)
      if (i + d >= 0 && i + d < 12) a.at(i, i + d) = d == 0 ? 6.0 + u(rng) : u(rng);
  Eigen::VectorXcd b(12);
  for (int i = 0; i < 12; ++i) b(i) = cplx(u(rng), u(rng));
  const Eigen::VectorXcd x = BandedLU<double>(a).solve(b);
  const Eigen::VectorXcd ref = a.dense().cast<cplx>().partialPivLu().solve(b);
  EXPECT_LE((x - ref).norm(), 1e-12 * ref.norm());
}

TEST(BandedLU, SingularIsReported) {
  PentaMatrix<double> a(5);
  a.band.col(2).setOnes();
  a.at(2, 2) = 0.0;
  EXPECT_THROW(BandedLU<double>{a}, SingularSystemError);
}

TEST(Bilaplacian, EnergyFormMatchesWallClosedVorticity) {
  auto g = make_grid(3, 33);
  std::mt19937_64 rng(4);
  const SpectralField h = to_spectral(fx::random_band_limited(g, rng));
  const SpectralField psi = solve_biharmonic_clamped_spectral(h);
  double form = 0.0;
  for (int k = 1; k <= g->kmax; ++k) {
    const Eigen::VectorXcd p = interior_of(psi.coeffs.row(k).transpose());
    form += 2.0 * g->dx2 * p.dot(bilaplacian_matrix(g->n2, k).apply(p)).real();
  }
  EXPECT_NEAR(2 * kPi * form, stream_enstrophy(psi), 1e-10 * stream_enstrophy(psi));
}

TEST(Biharmonic, ZeroSourceGivesZero) {
  auto g = make_grid(4, 33);
  EXPECT_EQ(max_abs(solve_biharmonic_clamped(SpectralField(g))), 0.0);
}

TEST(Biharmonic, ManufacturedSolutionConvergesAtSecondOrder) {
  std::vector<double> err;
  for (int n2 : {65, 129, 257}) {
    auto g = make_grid(4, n2);
    const Field psi = solve_biharmonic_clamped(to_spectral(fx::sample(g, manufactured_rhs)));
    const Field exact = fx::sample(g, [](double x, double y) { return std::cos(x) * std::pow(std::sin(kPi * y), 2); });
    err.push_back((psi.values - exact.values).cwiseAbs().maxCoeff());
  }
  EXPECT_GE(fx::order(err[0], err[1]), 1.9);
  EXPECT_GE(fx::order(err[1], err[2]), 1.9);
}

TEST(Biharmonic, SingleModeMatchesDenseSystem) {
  auto g = make_grid(2, 41);
  const Field h = fx::sample(g, [](double x, double) { return std::cos(x); });
  const SpectralField psi = solve_biharmonic_clamped_spectral(to_spectral(h));
  // Dense oracle: the same clamped stencil assembled entry by entry.
  const int n = g->n2 - 2;
  const double hh = g->dx2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    auto put = [&](int j, double v) {
      if (j == -2) j = 0;  // ghost psi_{-1} = psi_1
      else if (j == -1) return;
      else if (j == n) return;
      else if (j == n + 1) j = n - 1;
      a(i, j) += v;
    };
    const double c4 = 1 / std::pow(hh, 4), c2 = 1 / (hh * hh);
    // (D2 - 1)^2 = D4 - 2 D2 + 1 with k = 1
    put(i - 2, c4), put(i - 1, -4 * c4 - 2 * c2), put(i, 6 * c4 + 4 * c2 + 1), put(i + 1, -4 * c4 - 2 * c2),
        put(i + 2, c4);
  }
  const Eigen::VectorXd ref = a.lu().solve(Eigen::VectorXd::Constant(n, 0.5));
  EXPECT_LE((interior_of(psi.coeffs.row(1).transpose()).real() - ref).norm(), 1e-10 * ref.norm());
  EXPECT_LE(psi.coeffs.row(1).imag().norm(), 1e-14 * ref.norm());
}

// ||f||_{H^4} <= C ||P_h f|| over clamped fields, with P_h the operator the solver inverts.
TEST(Biharmonic, NormEquivalenceConstantIsGridStable) {
  std::vector<double> worst;
  for (int n2 : {65, 129, 257}) {
    auto g = make_grid(4, n2);
    double c = 0.0;
    for (int m = 1; m <= 3; ++m)
      for (int n = 1; n <= 3; ++n) {
        const Field f = fx::sample(g, [m, n](double x, double y) {
          return std::cos(m * x) * std::pow(std::sin(n * kPi * y), 2) + 0.5 * std::sin(x) * std::pow(std::sin(kPi * y), 4);
        });
        const SpectralField fh = to_spectral(f);
        SpectralField pf(g);
        for (int k = 0; k <= g->kmax; ++k)
          pf.coeffs.row(k) =
              with_walls(bilaplacian_matrix(n2, k).apply(interior_of(fh.coeffs.row(k).transpose()))).transpose();
        c = std::max(c, h_k_norm(f, SobolevIndex(4)) / l2_norm(to_physical(pf)));
      }
    worst.push_back(c);
  }
  EXPECT_NEAR(worst[1] / worst[0], 1.0, 0.2);
  EXPECT_NEAR(worst[2] / worst[1], 1.0, 0.2);
  // and the solver's inverse is bounded by the same constant on the family
  auto g = make_grid(4, 129);
  const Field h = fx::sample(g, [](double x, double y) { return std::cos(x) * (1.0 + y); });
  EXPECT_LE(h_k_norm(solve_biharmonic_clamped(to_spectral(h)), SobolevIndex(2)), 1.2 * worst[1] * l2_norm(h));
}

TEST(Biharmonic, Linear) {
  auto g = make_grid(5, 33);
  std::mt19937_64 rng(8);
  const SpectralField a = to_spectral(fx::random_band_limited(g, rng));
  const SpectralField b = to_spectral(fx::random_band_limited(g, rng));
  SpectralField c(g, 2.0 * a.coeffs - 3.0 * b.coeffs);
  const Field lhs = solve_biharmonic_clamped(c);
  const Eigen::MatrixXd rhs = 2.0 * solve_biharmonic_clamped(a).values - 3.0 * solve_biharmonic_clamped(b).values;
  EXPECT_LE((lhs.values - rhs).norm(), 1e-10 * rhs.norm());
}

TEST(Stokes, StratifiedDensityIsAtRest) {
  auto g = make_grid(21, 129);
  const Field rho = fx::sample(g, [](double, double y) { return 1.0 - y + 0.3 * std::sin(3 * y); });
  const StokesSolution s = solve_stokes_buoyancy(rho);
  EXPECT_LE(l2_norm(s.v), 1e-10 * l2_norm(rho));
  // q' = -rho
  const Field dq = ddx2(s.q);
  Field sum(g, dq.values + rho.values);
  EXPECT_LE(l2_norm(sum), 1e-3 * l2_norm(rho));
  EXPECT_NEAR(integrate(s.q), 0.0, 1e-10);
  EXPECT_LE(stratification_surrogate(rho), 1e-10);
}

TEST(Stokes, ClampedWallsAndLinearity) {
  auto g = make_grid(4, 65);
  auto rho = [&](double e) {
    return fx::sample(g, [e](double x, double y) { return 1 - y + e * std::cos(x) * std::pow(std::sin(kPi * y), 2); });
  };
  const StokesSolution a = solve_stokes_buoyancy(rho(1e-2));
  const StokesSolution b = solve_stokes_buoyancy(rho(2e-2));
  EXPECT_NEAR(l2_norm(b.v) / l2_norm(a.v), 2.0, 1e-10);
  EXPECT_EQ(a.v.u1.values.col(0).norm(), 0.0);
  EXPECT_EQ(a.v.u2.values.col(g->n2 - 1).norm(), 0.0);
  EXPECT_EQ(a.psi.values.col(0).norm(), 0.0);
  EXPECT_LE(l2_norm(divergence(a.v)), 1e-8 * l2_norm(a.v));
  EXPECT_NEAR(integrate(a.q), 0.0, 1e-10);
  EXPECT_GT(stratification_surrogate(rho(1e-2)), 0.0);
  EXPECT_NEAR(stratification_surrogate(rho(2e-2)) / stratification_surrogate(rho(1e-2)), 2.0, 1e-10);
}

TEST(Stokes, SurrogateIsHomogeneousInTheX1DependentPart) {
  auto g = make_grid(6, 65);
  std::mt19937_64 rng(2);
  Field pert = fx::random_band_limited(g, rng);
  const SpectralField ph = to_spectral(pert);
  for (int j = 0; j < g->n2; ++j) pert.values.col(j).array() -= ph.coeffs(0, j).real();
  const Field base = fx::sample(g, [](double, double y) { return 1.0 - y; });
  const double one = stratification_surrogate(Field(g, base.values + pert.values));
  const double tenth = stratification_surrogate(Field(g, base.values + 0.1 * pert.values));
  EXPECT_NEAR(tenth, 0.1 * one, 1e-10 * one);
}

TEST(Stokes, ResidualConvergesOnBubble) {
  std::vector<double> res, surr;
  for (int n2 : {65, 129, 257}) {
    auto g = make_grid(32, n2);
    const Field rho = bubble_density(g, 0.1);
    const StokesSolution s = solve_stokes_buoyancy(rho);
    res.push_back(l2_norm(stokes_residual(s, rho)));
    surr.push_back(stratification_surrogate(rho));
  }
  EXPECT_GE(fx::order(res[0], res[1]), 1.9);
  EXPECT_GE(fx::order(res[1], res[2]), 1.9);
  // Richardson estimate of the surrogate's convergence order.
  EXPECT_GE(fx::order(std::abs(surr[1] - surr[0]), std::abs(surr[2] - surr[1])), 1.9);
}

TEST(Leray, KillsGradients) {
  std::vector<double> err;
  for (int n2 : {65, 129, 257}) {
    auto g = make_grid(4, n2);
    // q0 = cos(x1 + 1) (1 + y^3) + y^2
    const Field f1 = fx::sample(g, [](double x, double y) { return -std::sin(x + 1) * (1 + y * y * y); });
    const Field f2 = fx::sample(g, [](double x, double y) { return std::cos(x + 1) * 3 * y * y + 2 * y; });
    const LerayResult r = leray_project(f1, f2);
    err.push_back(l2_norm(r.v) / std::hypot(l2_norm(f1), l2_norm(f2)));
  }
  EXPECT_LE(err[2], 1e-4);
  EXPECT_GE(fx::order(err[0], err[1]), 1.8);
}

TEST(Leray, SolenoidalFieldMapsToMinusItself) {
  auto g = make_grid(4, 65);
  std::mt19937_64 rng(6);
  Field psi = fx::random_band_limited(g, rng);
  psi.values.col(0).setZero();
  psi.values.col(g->n2 - 1).setZero();
  // Wall rows of u1 are set so the wall-cell divergence vanishes as well.
  const Field f2 = ddx1(psi);
  Field f1(g, -ddx2_interior(psi.values, g->dx2));
  {
    const SpectralField p = to_spectral(psi);
    SpectralField w(g);
    for (int k = 1; k <= g->kmax; ++k) {
      w.coeffs(k, 0) = -p.coeffs(k, 1) / g->dx2;
      w.coeffs(k, g->n2 - 1) = p.coeffs(k, g->n2 - 2) / g->dx2;
    }
    f1.values += to_physical(w).values;
  }
  const LerayResult r = leray_project(f1, f2);
  EXPECT_LE((r.v.u1.values + f1.values).norm(), 1e-10 * f1.values.norm());
  EXPECT_LE((r.v.u2.values + f2.values).norm(), 1e-10 * f2.values.norm());
}

TEST(Leray, ProjectionProperties) {
  auto g = make_grid(8, 65);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Field f1 = fx::random_band_limited(g, rng);
    const Field f2 = fx::random_band_limited(g, rng);
    const LerayResult r = leray_project(f1, f2);
    const double nv = l2_norm(r.v);
    EXPECT_LE(l2_norm(divergence(r.v)), 1e-8 * nv);
    EXPECT_LE(nv, std::hypot(l2_norm(f1), l2_norm(f2)) * (1 + 1e-6));
    EXPECT_EQ(r.v.u2.values.col(0).norm(), 0.0);
    const LerayResult rr = leray_project(r.v.u1, r.v.u2);
    EXPECT_LE(l2_norm(rr.v.u1.values.size() ? VelocityField{Field(g, rr.v.u1.values + r.v.u1.values),
                                                          Field(g, rr.v.u2.values + r.v.u2.values)}
                                           : r.v),
              1e-8 * nv);
  }
}

TEST(Helmholtz, IdentityAtZeroAlpha) {
  Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(33, 0.0, 1.0).array().sin();
  r(0) = r(32) = 0.0;
  EXPECT_LE((solve_helmholtz(3, 0.0, r, 1.0 / 32) - r).norm(), 1e-15);
}

TEST(Helmholtz, SineEigenfunction) {
  for (double alpha : {0.1, 1.0}) {
    const int n2 = 257;
    Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(n2, 0.0, 1.0);
    const Eigen::VectorXd r = (kPi * y.array()).sin();
    const Eigen::VectorXd sol = solve_helmholtz(0, alpha, r, 1.0 / (n2 - 1));
    EXPECT_LE((sol - r / (1 + alpha * kPi * kPi)).cwiseAbs().maxCoeff(), 1e-4);
  }
}

TEST(Helmholtz, StrongDampingBound) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::VectorXd r(65);
  for (int j = 0; j < 65; ++j) r(j) = u(rng);
  r(0) = r(64) = 0.0;
  const Eigen::VectorXd y = solve_helmholtz(5, 1e3, r, 1.0 / 64);
  EXPECT_LE(y.norm(), r.norm() / (1 + 1e3 * 25) * (1 + 1e-2));
  EXPECT_THROW(solve_helmholtz(5, -1.0, r, 1.0 / 64), std::invalid_argument);
}
