#include "bouss/odecheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bouss {

namespace {

constexpr double kSlack = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Running trapezoid integral of the piecewise-linear interpolant.
class Cumulative {
 public:
  Cumulative(const Eigen::VectorXd& t, const Eigen::VectorXd& q) : t_(t), q_(q), acc_(t.size()) {
    acc_(0) = 0.0;
    for (Eigen::Index i = 1; i < t.size(); ++i) acc_(i) = acc_(i - 1) + 0.5 * (t(i) - t(i - 1)) * (q(i) + q(i - 1));
  }

  double at(double x) const {
    const auto n = t_.size();
    x = std::clamp(x, t_(0), t_(n - 1));
    auto i = static_cast<Eigen::Index>(std::upper_bound(t_.data(), t_.data() + n, x) - t_.data()) - 1;
    i = std::clamp<Eigen::Index>(i, 0, n - 2);
    const double a = (x - t_(i)) / (t_(i + 1) - t_(i));
    const double qx = (1.0 - a) * q_(i) + a * q_(i + 1);
    return acc_(i) + 0.5 * (x - t_(i)) * (q_(i) + qx);
  }

  double total() const { return acc_(acc_.size() - 1); }
  double window(double t) const { return 2.0 / t * (at(t) - at(0.5 * t)); }

 private:
  const Eigen::VectorXd& t_;
  const Eigen::VectorXd& q_;
  Eigen::VectorXd acc_;
};

// Times whose window [t/2, t] lies inside the samples.
std::vector<double> window_times(const Eigen::VectorXd& t, double t_min) {
  std::vector<double> out;
  const double t0 = t(0);
  for (Eigen::Index i = 0; i < t.size(); ++i)
    if (t(i) > 0.0 && t(i) >= t_min && 0.5 * t(i) >= t0 * (1.0 - 1e-12)) out.push_back(t(i));
  return out;
}

struct Derivative {
  Eigen::VectorXd value;
  Eigen::VectorXd roundoff;
};

// Nonuniform three-point centered derivative at interior samples.
Derivative centered_derivative(const Eigen::VectorXd& t, const Eigen::VectorXd& q) {
  Derivative d{Eigen::VectorXd::Zero(t.size()), Eigen::VectorXd::Zero(t.size())};
  for (Eigen::Index i = 1; i + 1 < t.size(); ++i) {
    const double h1 = t(i) - t(i - 1), h2 = t(i + 1) - t(i);
    const double a = -h2 / (h1 * (h1 + h2)), b = (h2 - h1) / (h1 * h2), c = h1 / (h2 * (h1 + h2));
    d.value(i) = a * q(i - 1) + b * q(i) + c * q(i + 1);
    d.roundoff(i) = 16.0 * std::numeric_limits<double>::epsilon() *
                    (std::abs(a * q(i - 1)) + std::abs(b * q(i)) + std::abs(c * q(i + 1)));
  }
  return d;
}

// lhs <= rhs at interior samples, with slack relative to the largest term.
bool differential_holds(const Eigen::VectorXd& t, const Derivative& d, const Eigen::VectorXd& rhs,
                        std::string& detail, const char* what) {
  const Eigen::VectorXd& lhs = d.value;
  double scale = 0.0;
  for (Eigen::Index i = 1; i + 1 < t.size(); ++i)
    if (std::isfinite(rhs(i))) scale = std::max({scale, std::abs(lhs(i)), std::abs(rhs(i))});
  for (Eigen::Index i = 1; i + 1 < t.size(); ++i)
    if (lhs(i) > rhs(i) + kSlack * scale + d.roundoff(i)) {
      std::ostringstream os;
      os << what << " fails at t = " << t(i) << " (" << lhs(i) << " > " << rhs(i) << ")";
      detail = os.str();
      return false;
    }
  return true;
}

bool window_bound_holds(const Cumulative& c, const std::vector<double>& ts, double A, double power,
                        std::string& detail, const char* what) {
  for (double t : ts) {
    const double bound = A / std::pow(t, power);
    if (c.window(t) > bound * (1.0 + kSlack) + 1e-300) {
      std::ostringstream os;
      os << what << " fails at t = " << t << " (" << c.window(t) << " > " << bound << ")";
      detail = os.str();
      return false;
    }
  }
  return true;
}

double ratio(double num, double den) {
  if (num <= 0.0) return 0.0;
  return den > 0.0 ? num / den : kInf;
}

Verdict finish(Verdict v) {
  v.conclusion_holds = v.minimal_constant <= v.constant * (1.0 + kSlack);
  return v;
}

}  // namespace

const Eigen::VectorXd& SampledTrajectory::at(const std::string& name) const {
  const auto it = values.find(name);
  if (it == values.end()) throw std::invalid_argument("trajectory has no column '" + name + "'");
  return it->second;
}

void SampledTrajectory::validate(const std::vector<std::string>& required) const {
  if (times.size() < 3) throw std::invalid_argument("trajectory needs at least three samples");
  for (Eigen::Index i = 1; i < times.size(); ++i)
    if (!(times(i) > times(i - 1))) throw std::invalid_argument("trajectory times must be strictly increasing");
  for (const auto& name : required) {
    const Eigen::VectorXd& q = at(name);
    if (q.size() != times.size()) throw std::invalid_argument("column '" + name + "' has the wrong length");
    if (!q.allFinite() || (q.array() < 0.0).any())
      throw std::invalid_argument("column '" + name + "' must be finite and nonnegative");
  }
}

double lemma_a1_constant() {
  // max of 8 (decay through the set where g <= alpha) and (6/e)^2 (exponential phase)
  return std::max(8.0, 36.0 / std::exp(2.0));
}

double lemma_a2_constant(int n) { return 1.0 + 3.0 * std::pow(2.0, n - 1); }

double lemma_a3_constant(int n) {
  const double cn = std::pow(4.0 * (n - 1) / std::exp(1.0), n - 1);
  return lemma_a2_constant(n) * std::max({cn, std::pow(2.0, n - 2), 1.0});
}

double lemma_a4_constant(double alpha, double n) {
  return std::pow(2.0, -n * alpha) * (1.0 + 1.0 / (1.0 - std::pow(2.0, 1.0 - n * alpha)));
}

Verdict check_lemma_A1(const SampledTrajectory& traj, double C) {
  traj.validate({"f", "g", "alpha"});
  const auto& t = traj.times;
  const auto& f = traj.at("f");
  const auto& g = traj.at("g");
  const auto& al = traj.at("alpha");
  Verdict v;
  v.name = "A1";
  v.constant = C >= 0.0 ? C : lemma_a1_constant();

  const Eigen::VectorXd sum = f + g;
  const Derivative lhs = centered_derivative(t, sum);
  Eigen::VectorXd rhs(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double q = f(i) == 0.0 ? 0.0 : (al(i) > 0.0 ? f(i) * f(i) / al(i) : kInf);
    rhs(i) = -(q + g(i));
  }
  v.hypothesis_holds = differential_holds(t, lhs, rhs, v.hypothesis_detail, "d/dt(f+g) <= -(f^2/alpha+g)");

  const double T = t(t.size() - 1);
  const double A = std::max(Cumulative(t, al).total(), sum(0));
  v.minimal_constant = ratio(sum(t.size() - 1) * T * T, A);
  return finish(v);
}

Verdict check_lemma_A2(const SampledTrajectory& traj, double A, int n, double K) {
  traj.validate({"f", "g", "h"});
  if (!(A >= 0.0)) throw std::invalid_argument("check_lemma_A2: A must be nonnegative");
  const auto& t = traj.times;
  const auto& f = traj.at("f");
  const auto& g = traj.at("g");
  const auto& h = traj.at("h");
  Verdict v;
  v.name = "A2";
  v.constant = K >= 0.0 ? K : lemma_a2_constant(n);

  const Cumulative cf(t, f), cg(t, g), ch(t, h);
  const auto ts = window_times(t, 0.0);
  if (ts.empty()) throw std::invalid_argument("check_lemma_A2: no window [t/2, t] fits in the samples");
  v.hypothesis_holds = differential_holds(t, centered_derivative(t, f), h - g, v.hypothesis_detail, "f' <= -g + h") &&
                       window_bound_holds(cf, ts, A, n - 1, v.hypothesis_detail, "avg f <= A/t^(n-1)") &&
                       window_bound_holds(ch, ts, A, n, v.hypothesis_detail, "avg h <= A/t^n");
  double worst = 0.0;
  for (double s : ts) worst = std::max(worst, cg.window(s) * std::pow(s, n));
  v.minimal_constant = ratio(worst, A);
  return finish(v);
}

Verdict check_lemma_A3(const SampledTrajectory& traj, double A, int n, double K) {
  traj.validate({"f", "g"});
  if (!(A >= 0.0)) throw std::invalid_argument("check_lemma_A3: A must be nonnegative");
  const auto& t = traj.times;
  const auto& f = traj.at("f");
  const auto& g = traj.at("g");
  Verdict v;
  v.name = "A3";
  v.constant = K >= 0.0 ? K : lemma_a3_constant(n);

  const Cumulative cf(t, f), cg(t, g);
  const auto ts = window_times(t, 0.0);
  if (ts.empty()) throw std::invalid_argument("check_lemma_A3: no window [t/2, t] fits in the samples");
  v.hypothesis_holds = differential_holds(t, centered_derivative(t, f), g - f, v.hypothesis_detail, "f' <= -f + g") &&
                       window_bound_holds(cg, ts, A, n, v.hypothesis_detail, "avg g <= A/t^n");
  const double B = f(0) + cg.total();
  double worst = 0.0;
  for (double s : ts) worst = std::max(worst, cf.window(s) * std::pow(s, n));
  v.minimal_constant = ratio(worst, A + B);
  return finish(v);
}

Verdict check_lemma_A4(const SampledTrajectory& traj, double E, double n, double alpha, double C) {
  traj.validate({"f"});
  if (!(n > 1.0)) throw std::invalid_argument("check_lemma_A4: n must exceed 1");
  if (!(alpha > 1.0 / n && alpha <= 1.0)) throw std::invalid_argument("check_lemma_A4: alpha must lie in (1/n, 1]");
  const auto& t = traj.times;
  const double T = t(t.size() - 1);
  if (!(T > 2.0)) throw std::invalid_argument("check_lemma_A4: T must exceed 2");
  if (t(0) > 1.0) throw std::invalid_argument("check_lemma_A4: samples must start at or before t = 1");
  if (!(E >= 0.0)) throw std::invalid_argument("check_lemma_A4: E must be nonnegative");
  const auto& f = traj.at("f");
  Verdict v;
  v.name = "A4";
  v.constant = C >= 0.0 ? C : lemma_a4_constant(alpha, n);

  const Cumulative cf(t, f);
  v.hypothesis_holds = window_bound_holds(cf, window_times(t, 2.0), E, n, v.hypothesis_detail, "avg f <= E/t^n");
  const Eigen::VectorXd fa = f.array().pow(alpha);
  const Cumulative ca(t, fa);
  v.minimal_constant = ratio(ca.total() - ca.at(1.0), std::pow(E, alpha));
  return finish(v);
}

double minimal_window_bound(const SampledTrajectory& traj, const std::string& name, double n, double t_min) {
  traj.validate({name});
  const Cumulative c(traj.times, traj.at(name));
  double worst = 0.0;
  for (double s : window_times(traj.times, t_min)) worst = std::max(worst, c.window(s) * std::pow(s, n));
  return worst;
}

std::string format_verdict(const Verdict& v) {
  char buf[256];
  const char* status = !v.hypothesis_holds ? "hypothesis-violated" : (v.conclusion_holds ? "pass" : "fail");
  std::snprintf(buf, sizeof buf, "%-4s %-20s minimal_constant=%.6g constant=%.6g", v.name.c_str(), status,
                v.minimal_constant, v.constant);
  std::string out = buf;
  if (!v.hypothesis_detail.empty()) out += "  [" + v.hypothesis_detail + "]";
  return out;
}

namespace {

Eigen::VectorXd uniform(double a, double b, int n) { return Eigen::VectorXd::LinSpaced(n, a, b); }

Eigen::VectorXd geometric(double a, double b, double ratio) {
  const int n = static_cast<int>(std::ceil(std::log(b / a) / std::log(ratio))) + 1;
  Eigen::VectorXd t(n);
  for (int i = 0; i < n; ++i) t(i) = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  return t;
}

template <class F>
Eigen::VectorXd eval(const Eigen::VectorXd& t, F fn) {
  return t.unaryExpr(fn);
}

SampledTrajectory make(const Eigen::VectorXd& t, std::map<std::string, Eigen::VectorXd> values) {
  return {t, std::move(values)};
}

}  // namespace

std::vector<SyntheticCase> synthetic_cases() {
  auto dense = [](int d) { return 1.0 + 4e-4 / d; };
  auto zero = [](double) { return 0.0; };
  auto one = [](double) { return 1.0; };
  std::vector<SyntheticCase> out;

  out.push_back({"A1 exponential", true, [=](int d) {
                   const auto t = uniform(0.0, 10.0, 2000 * d + 1);
                   auto e = [](double s) { return std::exp(-s); };
                   return check_lemma_A1(make(t, {{"f", eval(t, e)}, {"g", eval(t, e)}, {"alpha", eval(t, one)}}));
                 }});
  out.push_back({"A1 algebraic", true, [=](int d) {
                   const auto t = uniform(0.0, 20.0, 2000 * d + 1);
                   auto f = [](double s) { return 0.5 / (1.0 + s); };
                   return check_lemma_A1(make(t, {{"f", eval(t, f)}, {"g", eval(t, zero)}, {"alpha", eval(t, one)}}));
                 }});
  out.push_back({"A1 zero", true, [=](int d) {
                   const auto t = uniform(0.0, 10.0, 100 * d + 1);
                   return check_lemma_A1(make(t, {{"f", eval(t, zero)}, {"g", eval(t, zero)}, {"alpha", eval(t, one)}}));
                 }});
  out.push_back({"A1 growing energy", false, [=](int d) {
                   const auto t = uniform(0.0, 10.0, 100 * d + 1);
                   return check_lemma_A1(make(t, {{"f", eval(t, zero)}, {"g", eval(t, one)}, {"alpha", eval(t, one)}}));
                 }});

  out.push_back({"A2 power law", true, [=](int d) {
                   const auto t = geometric(2.0, 100.0, dense(d));
                   auto f = [](double s) { return 1.0 / (s * s); };
                   auto g = [](double s) { return 2.0 / (s * s * s); };
                   return check_lemma_A2(make(t, {{"f", eval(t, f)}, {"g", eval(t, g)}, {"h", eval(t, zero)}}), 2.0, 3);
                 }});
  out.push_back({"A2 forced", true, [=](int d) {
                   const auto t = geometric(2.0, 100.0, dense(d));
                   auto f = [](double s) { return 1.0 / (s * s); };
                   auto g = [](double s) { return 2.5 / (s * s * s); };
                   auto h = [](double s) { return 1.0 / (s * s * s); };
                   return check_lemma_A2(make(t, {{"f", eval(t, f)}, {"g", eval(t, g)}, {"h", eval(t, h)}}), 3.0, 3);
                 }});
  out.push_back({"A2 zero", true, [=](int d) {
                   const auto t = geometric(2.0, 100.0, 1.0 + 1e-2 / d);
                   return check_lemma_A2(make(t, {{"f", eval(t, zero)}, {"g", eval(t, zero)}, {"h", eval(t, zero)}}), 1.0,
                                         3);
                 }});
  out.push_back({"A2 late forcing spike", false, [=](int d) {
                   const auto t = geometric(2.0, 100.0, dense(d));
                   auto f = [](double s) { return 1.0 / (s * s); };
                   auto spike = [](double s) { return 50.0 * std::exp(-(s - 90.0) * (s - 90.0)); };
                   return check_lemma_A2(make(t, {{"f", eval(t, f)}, {"g", eval(t, spike)}, {"h", eval(t, spike)}}), 2.0,
                                         3);
                 }});

  out.push_back({"A3 exponential", true, [=](int d) {
                   const auto t = uniform(0.0, 20.0, 10000 * d + 1);
                   auto f = [](double s) { return std::exp(-s); };
                   return check_lemma_A3(make(t, {{"f", eval(t, f)}, {"g", eval(t, zero)}}), 0.0, 3);
                 }});
  out.push_back({"A3 forced", true, [=](int d) {
                   const auto t = uniform(0.0, 50.0, 5000 * d + 1);
                   auto f = [](double s) { return std::pow(1.0 + s, -3.0); };
                   const auto traj = make(t, {{"f", eval(t, f)}, {"g", eval(t, f)}});
                   return check_lemma_A3(traj, minimal_window_bound(traj, "g", 3.0, 0.0), 3);
                 }});
  out.push_back({"A3 zero", true, [=](int d) {
                   const auto t = uniform(0.0, 20.0, 100 * d + 1);
                   return check_lemma_A3(make(t, {{"f", eval(t, zero)}, {"g", eval(t, zero)}}), 1.0, 3);
                 }});
  out.push_back({"A3 persistent forcing", false, [=](int d) {
                   const auto t = uniform(0.0, 100.0, 1000 * d + 1);
                   return check_lemma_A3(make(t, {{"f", eval(t, one)}, {"g", eval(t, one)}}), 1.0, 3);
                 }});

  out.push_back({"A4 inverse square", true, [=](int d) {
                   const auto t = geometric(1.0, 50.0, 1.0 + 1e-3 / d);
                   auto f = [](double s) { return 1.0 / (s * s); };
                   const auto traj = make(t, {{"f", eval(t, f)}});
                   return check_lemma_A4(traj, minimal_window_bound(traj, "f", 2.0), 2.0, 1.0);
                 }});
  out.push_back({"A4 sublinear power", true, [=](int d) {
                   const auto t = geometric(1.0, 50.0, 1.0 + 1e-3 / d);
                   auto f = [](double s) { return std::pow(s, -4.0); };
                   const auto traj = make(t, {{"f", eval(t, f)}});
                   return check_lemma_A4(traj, minimal_window_bound(traj, "f", 3.0), 3.0, 0.5);
                 }});
  out.push_back({"A4 zero", true, [=](int d) {
                   const auto t = uniform(0.0, 10.0, 100 * d + 1);
                   return check_lemma_A4(make(t, {{"f", eval(t, zero)}}), 0.0, 3.0, 0.5);
                 }});
  out.push_back({"A4 no decay", false, [=](int d) {
                   const auto t = uniform(1.0, 50.0, 500 * d + 1);
                   return check_lemma_A4(make(t, {{"f", eval(t, one)}}), 1.0, 2.0, 1.0);
                 }});
  return out;
}

}  // namespace bouss
