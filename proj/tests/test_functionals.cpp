#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bouss/elliptic.hpp"
#include "bouss/functionals.hpp"
#include "support.hpp"

using namespace bouss;
using fx::kPi;

namespace {

DiagnosticsRecord rec(double t, double E_T, double S) {
  DiagnosticsRecord r;
  r.t = t;
  r.E_T = E_T;
  r.S = S;
  return r;
}

Series power_series(double c, double p, double t0, double t1, int n) {
  Series s;
  for (int i = 0; i < n; ++i) {
    DiagnosticsRecord r;
    r.t = t0 * std::pow(t1 / t0, static_cast<double>(i) / (n - 1));
    r.E_T = c * std::pow(r.t, p);
    s.push_back(r);
  }
  return s;
}

// Stable-sorted descending stack, the same construction the cell form uses,
// done here by hand for a single column of equal cells.
double column_potential(const std::vector<double>& v) {
  double e = 0.0;
  for (size_t j = 0; j < v.size(); ++j) e += v[j] * (j + 0.5);
  return e;
}

}  // namespace

TEST(Energies, RestAndEquilibrium) {
  const auto g = make_grid(8, 33);
  const Field rho = fx::sample(g, [](double, double y) { return 1.0 - y; });
  const VelocityField u{Field(g), Field(g)};
  const Energies e = energies(rho, u, Profile(1.0 - g->x2.array()));
  EXPECT_EQ(e.E_K, 0.0);
  EXPECT_NEAR(e.E_P, 0.0, 1e-15);
}

TEST(Energies, SwappedPairMatchesHandValue) {
  const auto g = make_grid(8, 33);
  const Profile star = 1.0 - g->x2.array();
  Field rho = fx::sample(g, [](double, double y) { return 1.0 - y; });
  const int i = 3, j = 10;
  std::swap(rho.values(i, j), rho.values(i, j + 1));
  const VelocityField u{Field(g), Field(g)};
  const double h = g->dx2;
  // Heavier value lifted by h over a cell of area (2 pi / n1) h.
  const double expected = 2.0 * kPi / g->n1 * h * (star(j) - star(j + 1)) * h;
  EXPECT_NEAR(energies(rho, u, star).E_P, expected, 1e-15);
}

TEST(Defect, StratifiedDensityGivesSEqualsKinetic) {
  const auto g = make_grid(8, 65);
  const Field rho = fx::sample(g, [](double, double y) { return 1.0 - y * y; });
  const VelocityField u{fx::sample(g, [](double x, double y) { return std::sin(x) * y * (1 - y); }),
                        fx::sample(g, [](double x, double y) { return std::cos(2 * x) * y * (1 - y); })};
  const Defect d = defect_fields(rho, u);
  EXPECT_LE(l2_norm(d.v), 1e-10);
  const Energies e = energies(rho, u, Profile(1.0 - g->x2.array().square()));
  EXPECT_NEAR(d.S, e.E_K, 1e-9 * e.E_K);
}

TEST(Defect, VelocityEqualToStokesGivesZeroS) {
  const auto g = make_grid(8, 65);
  const Field rho = fx::sample(g, [](double x, double y) { return 1.0 - y + 0.1 * std::cos(x) * std::pow(std::sin(kPi * y), 4); });
  const StokesSolution st = solve_stokes_buoyancy(rho);
  const Defect d = defect_fields(rho, st.v);
  EXPECT_LE(d.S, 1e-24);
  EXPECT_LE(d.grad_w_sq, 1e-20);
}

TEST(Defect, TriangleInequality) {
  std::mt19937_64 rng(11);
  const auto g = make_grid(6, 33);
  for (int trial = 0; trial < 5; ++trial) {
    const Field rho = fx::random_band_limited(g, rng);
    const VelocityField u{fx::random_band_limited(g, rng), fx::random_band_limited(g, rng)};
    const Defect d = defect_fields(rho, u);
    EXPECT_LE(std::sqrt(d.grad_w_sq), std::sqrt(d.grad_u_sq) + std::sqrt(d.grad_v_sq) + 1e-12);
    EXPECT_GE(d.S, 0.0);
  }
}

TEST(Lyapunov, ValueAndPrecondition) {
  EXPECT_EQ(lyapunov_value(DiagnosticsRecord{}, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(lyapunov_value(rec(0, 2.0, 3.0), 10.0), 23.0);
  EXPECT_THROW(lyapunov_value(rec(0, 1, 1), 0.0), std::invalid_argument);
}

TEST(Lyapunov, MinimalC1Cases) {
  EXPECT_EQ(minimal_lyapunov_C1({rec(0, 3, 3), rec(1, 2, 2), rec(2, 1, 1)}), 0.0);
  // S rises by 0.3 while E_T falls by 0.1: need C1 >= 3.
  const Series s{rec(0, 1.0, 1.0), rec(1, 0.9, 1.3), rec(2, 0.5, 1.2), rec(3, 0.4, 1.25)};
  const double c1 = minimal_lyapunov_C1(s);
  double scan = kNoLyapunovConstant;
  for (int i = 0; i <= 1000000; ++i)
    if (lyapunov_nonincreasing(s, i * 1e-4)) {
      scan = i * 1e-4;
      break;
    }
  EXPECT_NEAR(c1, scan, 1.1e-3);
  EXPECT_NEAR(c1, 3.0, 1.1e-3);
  EXPECT_TRUE(lyapunov_nonincreasing(s, c1));
  EXPECT_EQ(minimal_lyapunov_C1({rec(0, 1, 1), rec(1, 2, 2), rec(2, 3, 3)}), kNoLyapunovConstant);
  EXPECT_THROW(minimal_lyapunov_C1({rec(1, 1, 1), rec(0, 1, 1), rec(2, 1, 1)}), std::invalid_argument);
}

TEST(Rearrangement, DecreasingProfileIsFixed) {
  const auto g = make_grid(8, 33);
  const Field rho = fx::sample(g, [](double, double y) { return 1.0 - y; });
  const auto r = vertical_rearrangement(rho);
  EXPECT_LE((r.rho_star - (1.0 - g->x2.array()).matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Rearrangement, TwoLayerSwap) {
  const std::vector<double> v{0.2, 0.2, 0.2, 0.2, 0.8, 0.8, 0.8, 0.8};
  const auto layers = rearrange_cells(v, std::vector<double>(8, 0.125));
  for (int i = 0; i < 4; ++i) EXPECT_EQ(layers[i].value, 0.8);
  for (int i = 4; i < 8; ++i) EXPECT_EQ(layers[i].value, 0.2);
  EXPECT_DOUBLE_EQ(layers[3].z_hi, 0.5);
}

TEST(Rearrangement, ExhaustiveMinimality) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    std::vector<double> x2(n);
    std::iota(x2.begin(), x2.end(), 0.0);
    const auto layers = rearrange_cells(v, std::vector<double>(n, 1.0), x2);
    const double e_star = stacked_potential(layers);
    std::vector<double> p = v;
    std::sort(p.begin(), p.end());
    double best = std::numeric_limits<double>::infinity();
    do best = std::min(best, column_potential(p));
    while (std::next_permutation(p.begin(), p.end()));
    EXPECT_NEAR(e_star, best, 1e-12);
    std::vector<double> sorted = v, out;
    for (const auto& l : layers) out.push_back(l.value);
    std::sort(sorted.begin(), sorted.end());
    std::sort(out.begin(), out.end());
    EXPECT_EQ(sorted, out);
  }
}

TEST(Rearrangement, IdempotentAndMonotone) {
  std::mt19937_64 rng(9);
  const auto g = make_grid(6, 33);
  const Field rho = fx::random_band_limited(g, rng);
  const auto r = vertical_rearrangement(rho);
  for (Eigen::Index j = 1; j < r.rho_star.size(); ++j) EXPECT_LE(r.rho_star(j), r.rho_star(j - 1));
  Field again(g);
  again.values.rowwise() = r.rho_star.transpose();
  EXPECT_EQ(vertical_rearrangement(again).rho_star, r.rho_star);
}

TEST(Sandwich, DegenerateAndSmallPerturbation) {
  const auto g = make_grid(8, 65);
  const auto prof = linear_profile(*g, 1.0);
  Field f(g);
  f.values.rowwise() = prof.rho_s.transpose();
  EXPECT_TRUE(sandwich_ratios(f, prof).degenerate);

  const Field p = fx::sample(g, [](double x, double y) { return 1.0 - y + 1e-2 * std::cos(x) * std::pow(std::sin(kPi * y), 4); });
  const auto r = sandwich_ratios(p, prof);
  EXPECT_FALSE(r.degenerate);
  for (double v : {r.lower, r.upper, r.gradient}) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
  }
  EXPECT_NEAR(r.lower * r.upper, 1.0, 1e-12);
}

TEST(WindowAverage, ClosedForms) {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(401, 0.0, 10.0);
  EXPECT_NEAR(window_average(t, Eigen::VectorXd::Constant(401, 2.5), 8.0), 2.5, 1e-14);
  EXPECT_NEAR(window_average(t, t, 4.0), 3.0, 1e-13);
  Eigen::VectorXd s = Eigen::VectorXd::LinSpaced(4001, 1.0, 10.0);
  const Eigen::VectorXd q = s.array().square().inverse();
  // (2/t) int_{t/2}^t s^-2 ds = 2 / t^2
  EXPECT_NEAR(window_average(s, q, 8.0), 2.0 / 64.0, 1e-7);
  EXPECT_THROW(window_average(s, q, 1.5), std::out_of_range);
}

TEST(DecaySlope, PowerLaws) {
  EXPECT_NEAR(decay_slope(power_series(7.0, -2.0, 1.0, 100.0, 50), "E_T", 1.0, 100.0).slope, -2.0, 1e-6);
  EXPECT_NEAR(decay_slope(power_series(3.0, -1.0, 1.0, 100.0, 50), "E_T", 1.0, 100.0).slope, -1.0, 1e-6);
  EXPECT_TRUE(decay_slope(power_series(3.0, -1.0, 1.0, 100.0, 50), "E_T", 20.0, 100.0).short_window);
  Series bad = power_series(3.0, -1.0, 1.0, 100.0, 50);
  bad[10].E_T = 0.0;
  EXPECT_THROW(decay_slope(bad, "E_T", 1.0, 100.0), std::domain_error);
}

TEST(InstabilityProxies, SyntheticSeries) {
  Series s;
  for (int i = 0; i <= 1000; ++i) {
    DiagnosticsRecord r;
    r.t = 0.1 * i;
    r.d1rho_l2 = 2.0;
    r.strat_surrogate = std::pow(1.0 + r.t, -0.5);
    r.grad_v_sq = r.strat_surrogate * r.strat_surrogate;
    s.push_back(r);
  }
  const auto p = instability_proxies(s, 10.0, 10.0);
  EXPECT_EQ(p.min_d1rho, 2.0);
  EXPECT_NEAR(p.lowerbound_growth_k1, std::sqrt(101.0 / 11.0), 1e-12);
  ASSERT_EQ(p.gradv_increments.size(), 10u);
  EXPECT_TRUE(p.saturating);
  // int 1/(1+t) = log(1+t)
  EXPECT_NEAR(p.cumulative_gradv, std::log(101.0), 1e-3);
}

TEST(Records, ColumnOrderAndLookup) {
  DiagnosticsRecord r;
  r.t = 1;
  r.u_l2 = 13;
  const auto v = record_values(r);
  EXPECT_EQ(v.front(), 1.0);
  EXPECT_EQ(v.back(), 13.0);
  EXPECT_EQ(record_value(r, "u_l2"), 13.0);
  EXPECT_THROW(record_value(r, "nope"), std::invalid_argument);
  EXPECT_EQ(record_values(record_from_values(v)), v);
}
