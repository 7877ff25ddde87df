#include <gtest/gtest.h>

#include <cmath>

#include "bouss/odecheck.hpp"

using namespace bouss;

namespace {

SampledTrajectory sampled(const Eigen::VectorXd& t, std::map<std::string, std::function<double(double)>> fns) {
  SampledTrajectory out{t, {}};
  for (auto& [name, fn] : fns) out.values[name] = t.unaryExpr(fn);
  return out;
}

// Exact window average of c t^p by antiderivative.
double power_window(double c, double p, double t) {
  return 2.0 / t * c * (std::pow(t, p + 1) - std::pow(0.5 * t, p + 1)) / (p + 1);
}

}  // namespace

TEST(OdeConstants, ClosedForms) {
  EXPECT_DOUBLE_EQ(lemma_a1_constant(), 8.0);
  EXPECT_DOUBLE_EQ(lemma_a2_constant(3), 13.0);
  EXPECT_NEAR(lemma_a3_constant(3), 13.0 * 64.0 / std::exp(2.0), 1e-12);
  EXPECT_NEAR(lemma_a4_constant(0.5, 3.0), std::pow(2.0, -1.5) * (1.0 + 1.0 / (1.0 - std::pow(2.0, -0.5))), 1e-14);
  EXPECT_DOUBLE_EQ(lemma_a4_constant(1.0, 2.0), 0.75);
}

TEST(LemmaA1, ExponentialMatchesOracle) {
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(4001, 0.0, 10.0);
  auto e = [](double s) { return std::exp(-s); };
  const auto v = check_lemma_A1(sampled(t, {{"f", e}, {"g", e}, {"alpha", [](double) { return 1.0; }}}));
  EXPECT_TRUE(v.hypothesis_holds) << v.hypothesis_detail;
  // A = max(int_0^10 1, 2) = 10
  EXPECT_NEAR(v.minimal_constant, 2.0 * std::exp(-10.0) * 100.0 / 10.0, 1e-12);
  EXPECT_TRUE(v.pass());
}

TEST(LemmaA1, ViolatedInequalityIsNotAFailure) {
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(201, 0.0, 10.0);
  // Decays, but gains energy on [4, 6].
  auto f = [](double s) { return std::exp(-s) + (s > 4.0 && s < 6.0 ? 0.01 * std::sin(M_PI * (s - 4.0) / 2.0) : 0.0); };
  const auto v = check_lemma_A1(sampled(t, {{"f", f}, {"g", f}, {"alpha", [](double) { return 1.0; }}}));
  EXPECT_FALSE(v.hypothesis_holds);
  EXPECT_TRUE(v.conclusion_holds);
  EXPECT_NE(format_verdict(v).find("hypothesis-violated"), std::string::npos);
}

TEST(LemmaA1, ZeroPassesWithZeroConstant) {
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(11, 0.0, 10.0);
  auto z = [](double) { return 0.0; };
  const auto v = check_lemma_A1(sampled(t, {{"f", z}, {"g", z}, {"alpha", [](double) { return 1.0; }}}));
  EXPECT_TRUE(v.pass());
  EXPECT_EQ(v.minimal_constant, 0.0);
}

TEST(LemmaA1, RejectsBadTrajectories) {
  auto z = [](double) { return 0.0; };
  Eigen::VectorXd t(3);
  t << 0.0, 2.0, 1.0;
  EXPECT_THROW(check_lemma_A1(sampled(t, {{"f", z}, {"g", z}, {"alpha", z}})), std::invalid_argument);
  EXPECT_THROW(check_lemma_A1(SampledTrajectory{}), std::invalid_argument);
  const Eigen::VectorXd ok = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
  EXPECT_THROW(check_lemma_A1(sampled(ok, {{"f", [](double) { return -1.0; }}, {"g", z}, {"alpha", z}})),
               std::invalid_argument);
  EXPECT_THROW(check_lemma_A1(sampled(ok, {{"f", z}, {"g", z}})), std::invalid_argument);
}

TEST(LemmaA1, VerdictMonotoneInConstant) {
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(101, 0.0, 10.0);
  auto z = [](double) { return 0.0; };
  auto one = [](double) { return 1.0; };
  const auto traj = sampled(t, {{"f", z}, {"g", one}, {"alpha", one}});
  const double cmin = check_lemma_A1(traj).minimal_constant;
  EXPECT_NEAR(cmin, 10.0, 1e-12);
  EXPECT_FALSE(check_lemma_A1(traj, 0.99 * cmin).conclusion_holds);
  for (double c : {cmin, 2 * cmin, 100 * cmin}) EXPECT_TRUE(check_lemma_A1(traj, c).conclusion_holds);
}

TEST(LemmaA2, PowerLawMatchesOracle) {
  Eigen::VectorXd t(20001);
  for (int i = 0; i <= 20000; ++i) t(i) = 2.0 * std::pow(50.0, i / 20000.0);
  const auto v = check_lemma_A2(sampled(t, {{"f", [](double s) { return 1.0 / (s * s); }},
                                            {"g", [](double s) { return 2.0 / (s * s * s); }},
                                            {"h", [](double) { return 0.0; }}}),
                                2.0, 3);
  EXPECT_TRUE(v.hypothesis_holds) << v.hypothesis_detail;
  // avg g = 6 / t^3 exactly, so the constant is 6 / A
  EXPECT_NEAR(v.minimal_constant, power_window(2.0, -3.0, 50.0) * std::pow(50.0, 3) / 2.0, 1e-6);
  EXPECT_NEAR(v.minimal_constant, 3.0, 1e-6);
  EXPECT_TRUE(v.pass());
}

TEST(LemmaA2, WindowHypothesisChecked) {
  Eigen::VectorXd t(4001);
  for (int i = 0; i <= 4000; ++i) t(i) = 2.0 * std::pow(50.0, i / 4000.0);
  auto z = [](double) { return 0.0; };
  // f is constant, so avg f <= A / t^2 fails for large t.
  const auto v = check_lemma_A2(sampled(t, {{"f", [](double) { return 1.0; }}, {"g", z}, {"h", z}}), 2.0, 3);
  EXPECT_FALSE(v.hypothesis_holds);
  EXPECT_NE(v.hypothesis_detail.find("avg f"), std::string::npos);
}

TEST(LemmaA3, ExponentialMatchesOracle) {
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(20001, 0.0, 20.0);
  const auto v = check_lemma_A3(sampled(t, {{"f", [](double s) { return std::exp(-s); }}, {"g", [](double) { return 0.0; }}}),
                                0.0, 3);
  EXPECT_TRUE(v.hypothesis_holds) << v.hypothesis_detail;
  // avg f = (2/t)(e^{-t/2} - e^{-t}), B = 1
  double best = 0.0;
  for (int i = 1; i <= 20000; ++i) {
    const double s = 20.0 * i / 20000.0;
    best = std::max(best, 2.0 * s * s * (std::exp(-0.5 * s) - std::exp(-s)));
  }
  EXPECT_NEAR(v.minimal_constant, best, 1e-5 * best);
  EXPECT_TRUE(v.pass());
}

TEST(LemmaA3, NonDecayingForcingViolatesHypothesis) {
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(1001, 0.0, 100.0);
  auto one = [](double) { return 1.0; };
  const auto v = check_lemma_A3(sampled(t, {{"f", one}, {"g", one}}), 1.0, 3);
  EXPECT_FALSE(v.hypothesis_holds);
  EXPECT_FALSE(v.conclusion_holds);
}

TEST(LemmaA4, InverseSquareMatchesOracle) {
  Eigen::VectorXd t(8001);
  for (int i = 0; i <= 8000; ++i) t(i) = std::pow(50.0, i / 8000.0);
  const auto traj = sampled(t, {{"f", [](double s) { return 1.0 / (s * s); }}});
  const double E = minimal_window_bound(traj, "f", 2.0);
  EXPECT_NEAR(E, 2.0, 1e-6);  // avg of t^-2 is 2 / t^2
  const auto v = check_lemma_A4(traj, E, 2.0, 1.0);
  EXPECT_TRUE(v.pass());
  EXPECT_NEAR(v.minimal_constant, (1.0 - 1.0 / 50.0) / 2.0, 1e-6);
}

TEST(LemmaA4, Preconditions) {
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(101, 0.0, 10.0);
  const auto traj = sampled(t, {{"f", [](double) { return 0.0; }}});
  EXPECT_THROW(check_lemma_A4(traj, 1.0, 3.0, 1.0 / 3.0), std::invalid_argument);
  EXPECT_THROW(check_lemma_A4(traj, 1.0, 3.0, 1.5), std::invalid_argument);
  EXPECT_THROW(check_lemma_A4(traj, 1.0, 1.0, 1.0), std::invalid_argument);
  const auto short_traj = sampled(Eigen::VectorXd::LinSpaced(11, 0.0, 2.0), {{"f", [](double) { return 0.0; }}});
  EXPECT_THROW(check_lemma_A4(short_traj, 1.0, 3.0, 0.5), std::invalid_argument);
  const auto v = check_lemma_A4(traj, 0.0, 3.0, 0.5);
  EXPECT_TRUE(v.pass());
  EXPECT_EQ(v.minimal_constant, 0.0);
}

TEST(SyntheticSuite, PositivesPassNegativesFail) {
  for (const auto& c : synthetic_cases()) {
    const Verdict v = c.run(1);
    if (c.positive) {
      EXPECT_TRUE(v.pass()) << c.name << ": " << format_verdict(v);
    } else {
      EXPECT_FALSE(v.pass()) << c.name;
      EXPECT_FALSE(v.conclusion_holds) << c.name << ": " << format_verdict(v);
    }
  }
}

TEST(SyntheticSuite, MinimalConstantsStableUnderRefinement) {
  for (const auto& c : synthetic_cases()) {
    const double a = c.run(1).minimal_constant, b = c.run(2).minimal_constant, d = c.run(4).minimal_constant;
    if (a == 0.0) {
      EXPECT_EQ(b, 0.0) << c.name;
      continue;
    }
    EXPECT_LE(std::abs(b - a), 0.05 * std::abs(b)) << c.name;
    EXPECT_LE(std::abs(d - b), 0.05 * std::abs(d)) << c.name;
  }
}

TEST(SyntheticSuite, LateSpikeGivesLargeConstant) {
  for (const auto& c : synthetic_cases())
    if (c.name == "A2 late forcing spike") EXPECT_GT(c.run(1).minimal_constant, 1e3);
}
