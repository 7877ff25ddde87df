#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bouss {

struct SampledTrajectory {
  Eigen::VectorXd times;
  std::map<std::string, Eigen::VectorXd> values;

  const Eigen::VectorXd& at(const std::string& name) const;
  // Throws on unsorted times, length mismatch, or negative values.
  void validate(const std::vector<std::string>& required) const;
};

struct Verdict {
  std::string name;
  bool hypothesis_holds = true;
  std::string hypothesis_detail;  // first violated inequality, if any
  bool conclusion_holds = true;
  double minimal_constant = 0.0;  // smallest constant for which the conclusion holds
  double constant = 0.0;          // constant the conclusion was checked against
  bool pass() const { return hypothesis_holds && conclusion_holds; }
};

// Constants that follow from the proofs with every step made explicit.
double lemma_a1_constant();
double lemma_a2_constant(int n);
double lemma_a3_constant(int n);
double lemma_a4_constant(double alpha, double n);

// d/dt(f + g) <= -(f^2/alpha + g)  =>  f(T) + g(T) <= C A / T^2,  A = max(int alpha, f(0) + g(0)).
Verdict check_lemma_A1(const SampledTrajectory& traj, double C = -1.0);
// f' <= -g + h, avg f <= A / t^{n-1}, avg h <= A / t^n  =>  avg g <= K A / t^n.
Verdict check_lemma_A2(const SampledTrajectory& traj, double A, int n, double K = -1.0);
// f' <= -f + g, avg g <= A / t^n  =>  avg f <= K (A + B) / t^n,  B = f(0) + int g.
Verdict check_lemma_A3(const SampledTrajectory& traj, double A, int n, double K = -1.0);
// avg f <= E / t^n on [2, T]  =>  int_1^T f^alpha <= C E^alpha,  alpha in (1/n, 1].
Verdict check_lemma_A4(const SampledTrajectory& traj, double E, double n, double alpha, double C = -1.0);

// Smallest E with avg f <= E / t^n at every covered t in [2, T].
double minimal_window_bound(const SampledTrajectory& traj, const std::string& name, double n, double t_min = 2.0);

std::string format_verdict(const Verdict& v);

// Synthetic families used by verify-ode and the test suites. Each family is
// sampled at the requested density; positives must pass, negatives must fail.
struct SyntheticCase {
  std::string name;
  bool positive;
  std::function<Verdict(int density)> run;
};
std::vector<SyntheticCase> synthetic_cases();

}  // namespace bouss
