#include "bouss/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bouss/elliptic.hpp"

namespace bouss {

namespace {

double trapezoid(const Profile& f, double h) { return h * (f.sum() - 0.5 * (f(0) + f(f.size() - 1))); }

void require_sorted(const Eigen::VectorXd& t, const char* who) {
  for (Eigen::Index i = 1; i < t.size(); ++i)
    if (!(t(i) > t(i - 1))) throw std::invalid_argument(std::string(who) + ": times must be strictly increasing");
}

// Trapezoid integral of a sampled column from times(0) to each sample.
Eigen::VectorXd cumulative(const Eigen::VectorXd& t, const Eigen::VectorXd& q) {
  Eigen::VectorXd c(t.size());
  c(0) = 0.0;
  for (Eigen::Index i = 1; i < t.size(); ++i) c(i) = c(i - 1) + 0.5 * (t(i) - t(i - 1)) * (q(i) + q(i - 1));
  return c;
}

double mean_enstrophy(const Profile& mean, double h) {
  double s = 0.0;
  for (Eigen::Index j = 0; j + 1 < mean.size(); ++j) s += (mean(j + 1) - mean(j)) * (mean(j + 1) - mean(j)) / h;
  return ChannelGrid::x1_period * s;
}

}  // namespace

std::array<double, 13> record_values(const DiagnosticsRecord& r) {
  return {r.t,         r.E_P,      r.E_K,      r.E_T,           r.S,          r.grad_u_sq, r.grad_v_sq,
          r.grad_w_sq, r.d1rho_l2, r.d1rho_h1, r.strat_surrogate, r.dist_rearr, r.u_l2};
}

DiagnosticsRecord record_from_values(const std::array<double, 13>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11], v[12]};
}

double record_value(const DiagnosticsRecord& r, std::string_view column) {
  const auto vals = record_values(r);
  for (size_t i = 0; i < kRecordColumns.size(); ++i)
    if (kRecordColumns[i] == column) return vals[i];
  throw std::invalid_argument("unknown diagnostics column: " + std::string(column));
}

Eigen::VectorXd column(const Series& s, std::string_view name) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(s.size()));
  for (size_t i = 0; i < s.size(); ++i) c(static_cast<Eigen::Index>(i)) = record_value(s[i], name);
  return c;
}

Energies energies(const Field& rho, const VelocityField& u, const Profile& rho0_star) {
  const auto& g = rho.grid;
  Field rel(g, rho.values);
  rel.values.rowwise() -= rho0_star.transpose();
  rel.values.array().rowwise() *= g->x2.transpose().array();
  Energies e;
  e.E_P = integrate(rel);
  const double u2 = l2_norm(u);
  e.E_K = 0.5 * u2 * u2;
  e.E_T = e.E_P + e.E_K;
  return e;
}

Defect defect_fields(const Field& rho, const VelocityField& u) {
  const StokesSolution st = solve_stokes_buoyancy(rho);
  Defect d;
  d.v = st.v;
  d.w = u - st.v;
  const double w2 = l2_norm(d.w);
  d.S = 0.5 * w2 * w2;
  d.grad_u_sq = grad_sq(u);
  d.grad_v_sq = grad_sq(d.v);
  d.grad_w_sq = grad_sq(d.w);
  return d;
}

DiagnosticsRecord diagnose_state(const SimState& s, const HydrostaticProfile& profile, const Profile& rho0_star) {
  const auto& grid = s.theta.grid;
  const auto& g = *grid;
  const double h = g.dx2;
  const double two_pi = ChannelGrid::x1_period;
  DiagnosticsRecord r;
  r.t = s.t;

  const Profile mean_rho = s.theta.coeffs.row(0).real().transpose() + profile.rho_s;
  r.E_P = two_pi * trapezoid(((mean_rho - rho0_star).array() * g.x2.array()).matrix(), h);

  const double mean_kin = two_pi * trapezoid(s.mean_u1.cwiseAbs2(), h);
  const double mean_ens = mean_enstrophy(s.mean_u1, h);
  r.E_K = 0.5 * (stream_kinetic(s.phi) + mean_kin);
  r.E_T = r.E_P + r.E_K;
  r.grad_u_sq = stream_enstrophy(s.phi) + mean_ens;

  const SpectralField psi = stokes_stream_function(s.theta);
  const SpectralField chi(grid, s.phi.coeffs - psi.coeffs);
  r.grad_v_sq = stream_enstrophy(psi);
  r.strat_surrogate = std::sqrt(r.grad_v_sq);
  r.S = 0.5 * (stream_kinetic(chi) + mean_kin);
  r.grad_w_sq = stream_enstrophy(chi) + mean_ens;

  const SpectralField d1 = ddx1(s.theta);
  const Eigen::VectorXd w = g.x2_weights();
  double d1sq = 0.0;
  for (int k = 1; k <= g.kmax; ++k) d1sq += 2.0 * d1.coeffs.row(k).cwiseAbs2().dot(w.transpose());
  r.d1rho_l2 = std::sqrt(two_pi * d1sq);
  r.d1rho_h1 = h_k_norm(to_physical(d1), SobolevIndex(1));

  Field dist = density(s, profile);
  dist.values.rowwise() -= rho0_star.transpose();
  r.dist_rearr = l2_norm(dist);
  r.u_l2 = std::sqrt(2.0 * r.E_K);
  return r;
}

double lyapunov_value(const DiagnosticsRecord& r, double C1) {
  if (!(C1 > 0.0)) throw std::invalid_argument("lyapunov_value: C1 must be positive");
  return C1 * r.E_T + r.S;
}

bool lyapunov_nonincreasing(const Series& series, double C1, double rel_slack) {
  if (series.empty()) return true;
  const double slack = rel_slack * std::abs(C1 * series.front().E_T + series.front().S);
  for (size_t n = 1; n < series.size(); ++n) {
    const double prev = C1 * series[n - 1].E_T + series[n - 1].S;
    const double next = C1 * series[n].E_T + series[n].S;
    if (next > prev + slack) return false;
  }
  return true;
}

double minimal_lyapunov_C1(const Series& series) {
  if (series.size() < 3) throw std::invalid_argument("minimal_lyapunov_C1: need at least 3 samples");
  for (size_t n = 1; n < series.size(); ++n)
    if (!(series[n].t > series[n - 1].t)) throw std::invalid_argument("minimal_lyapunov_C1: unordered series");
  constexpr double c_max = 1e6;
  constexpr double tol = 1e-3;
  if (lyapunov_nonincreasing(series, 0.0)) return 0.0;
  if (!lyapunov_nonincreasing(series, c_max)) {
    // Upper bounds from steps where E_T grows can still leave a window below c_max.
    double lo = 0.0;
    for (size_t n = 1; n < series.size(); ++n) {
      const double de = series[n].E_T - series[n - 1].E_T;
      const double ds = series[n].S - series[n - 1].S;
      if (de < 0.0 && ds > 0.0) lo = std::max(lo, ds / -de);
    }
    if (lo < c_max && lyapunov_nonincreasing(series, lo * (1 + 1e-12) + tol)) return lo * (1 + 1e-12) + tol;
    return kNoLyapunovConstant;
  }
  double lo = 0.0, hi = c_max;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (lyapunov_nonincreasing(series, mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<CellLayer> rearrange_cells(const std::vector<double>& values, const std::vector<double>& measures,
                                       const std::vector<double>& x2, const std::vector<double>& x1, double width) {
  const size_t n = values.size();
  if (measures.size() != n || (!x2.empty() && x2.size() != n) || (!x1.empty() && x1.size() != n))
    throw std::invalid_argument("rearrange_cells: size mismatch");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto key2 = [&](int i) { return x2.empty() ? 0.0 : x2[i]; };
  auto key1 = [&](int i) { return x1.empty() ? 0.0 : x1[i]; };
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (values[a] != values[b]) return values[a] > values[b];
    if (key2(a) != key2(b)) return key2(a) < key2(b);
    return key1(a) < key1(b);
  });
  std::vector<CellLayer> out;
  out.reserve(n);
  double z = 0.0;
  for (int i : idx) {
    const double dz = measures[i] / width;
    out.push_back({values[i], measures[i], z, z + dz, i});
    z += dz;
  }
  return out;
}

double stacked_potential(const std::vector<CellLayer>& layers, double width) {
  double e = 0.0;
  for (const auto& l : layers) e += l.value * 0.5 * (l.z_hi * l.z_hi - l.z_lo * l.z_lo) * width;
  return e;
}

RearrangementResult vertical_rearrangement(const Field& rho) {
  const auto& g = *rho.grid;
  const int n1 = g.n1, n2 = g.n2;
  const Eigen::MatrixXd& v = rho.values;
  RearrangementResult out;
  out.layer_measures = ChannelGrid::x1_period * g.x2;

  bool stratified = true;
  for (int i = 1; i < n1 && stratified; ++i) stratified = v.row(i) == v.row(0);
  for (int j = 0; j + 1 < n2 && stratified; ++j) stratified = v(0, j + 1) <= v(0, j);
  if (stratified) {
    out.rho_star = v.row(0).transpose();
    return out;
  }

  // Each x2 segment of each column is a linear piece of measure dx1 * dx2.
  // Its share of {rho > s} grows at rate m / (hi - lo) for lo < s < hi.
  struct Event {
    double value;
    double slope;  // change of d(mu)/d(-s) when passing value downward
    double jump;   // flat pieces
  };
  const double m = g.dx1() * g.dx2;
  std::vector<Event> ev;
  ev.reserve(2 * static_cast<size_t>(n1) * (n2 - 1));
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j + 1 < n2; ++j) {
      const double lo = std::min(v(i, j), v(i, j + 1));
      const double hi = std::max(v(i, j), v(i, j + 1));
      if (hi > lo) {
        ev.push_back({hi, m / (hi - lo), 0.0});
        ev.push_back({lo, -m / (hi - lo), 0.0});
      } else {
        ev.push_back({hi, 0.0, m});
      }
    }
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.value > b.value; });

  out.rho_star.resize(n2);
  int next = 0;
  double v_prev = ev.front().value, mu = 0.0, slope = 0.0;
  size_t e = 0;
  while (e < ev.size() && next < n2) {
    const double vg = ev[e].value;
    const double mu_at = mu + slope * (v_prev - vg);
    while (next < n2 && out.layer_measures(next) <= mu_at) {
      const double target = out.layer_measures(next);
      out.rho_star(next) = slope > 0.0 ? std::max(vg, v_prev - (target - mu) / slope) : v_prev;
      ++next;
    }
    double jump = 0.0, dslope = 0.0;
    for (; e < ev.size() && ev[e].value == vg; ++e) {
      jump += ev[e].jump;
      dslope += ev[e].slope;
    }
    while (next < n2 && out.layer_measures(next) <= mu_at + jump) out.rho_star(next++) = vg;
    mu = mu_at + jump;
    slope = std::max(0.0, slope + dslope);
    v_prev = vg;
  }
  for (; next < n2; ++next) out.rho_star(next) = ev.back().value;
  return out;
}

SandwichRatios sandwich_ratios(const Field& f, const HydrostaticProfile& profile) {
  const auto& g = f.grid;
  const RearrangementResult star = vertical_rearrangement(f);
  Field d(g, f.values);
  d.values.rowwise() -= star.rho_star.transpose();
  const double nd2 = inner(d, d);
  SandwichRatios r;
  Field pert(g, f.values);
  pert.values.rowwise() -= profile.rho_s.transpose();
  r.large_perturbation = h_k_norm(pert, SobolevIndex(3)) > 1.0;
  if (nd2 <= std::pow(1e-13 * l2_norm(f), 2)) {
    r.degenerate = true;
    r.lower = r.upper = r.gradient = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  Field dx(g, d.values);
  dx.values.array().rowwise() *= g->x2.transpose().array();
  const double ep = integrate(dx);
  r.lower = ep / nd2;
  r.upper = nd2 / ep;
  r.gradient = l2_norm(ddx1(f)) / std::sqrt(nd2);
  return r;
}

double interpolate(const Eigen::VectorXd& times, const Eigen::VectorXd& q, double t) {
  const auto n = times.size();
  if (n == 0 || t < times(0) || t > times(n - 1)) throw std::out_of_range("interpolate: t outside the sampled range");
  const auto it = std::lower_bound(times.data(), times.data() + n, t);
  const auto i = static_cast<Eigen::Index>(it - times.data());
  if (times(i) == t) return q(i);
  const double a = (t - times(i - 1)) / (times(i) - times(i - 1));
  return (1.0 - a) * q(i - 1) + a * q(i);
}

double window_average(const Eigen::VectorXd& times, const Eigen::VectorXd& q, double t) {
  if (times.size() != q.size() || times.size() < 2) throw std::invalid_argument("window_average: bad series");
  require_sorted(times, "window_average");
  const double a = 0.5 * t, b = t;
  const double eps = 1e-12 * std::max(1.0, std::abs(t));
  if (!(t > 0.0) || times(0) > a + eps || times(times.size() - 1) < b - eps)
    throw std::out_of_range("window_average: samples do not cover [t/2, t] at t = " + std::to_string(t));
  const double ac = std::max(a, times(0)), bc = std::min(b, times(times.size() - 1));
  std::vector<double> ts{ac}, qs{interpolate(times, q, ac)};
  for (Eigen::Index i = 0; i < times.size(); ++i)
    if (times(i) > ac && times(i) < bc) {
      ts.push_back(times(i));
      qs.push_back(q(i));
    }
  ts.push_back(bc);
  qs.push_back(interpolate(times, q, bc));
  double s = 0.0;
  for (size_t i = 1; i < ts.size(); ++i) s += 0.5 * (ts[i] - ts[i - 1]) * (qs[i] + qs[i - 1]);
  return 2.0 / t * s;
}

double window_average(const Series& s, std::string_view quantity, double t) {
  return window_average(column(s, "t"), column(s, quantity), t);
}

SlopeFit decay_slope(const Eigen::VectorXd& times, const Eigen::VectorXd& q, double t_lo, double t_hi) {
  if (times.size() != q.size()) throw std::invalid_argument("decay_slope: size mismatch");
  std::vector<double> lx, ly;
  const double eps = 1e-12 * std::max(1.0, std::abs(t_hi));
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    if (times(i) < t_lo - eps || times(i) > t_hi + eps) continue;
    if (!(q(i) > 0.0) || !(times(i) > 0.0))
      throw std::domain_error("decay_slope: nonpositive value at t = " + std::to_string(times(i)));
    lx.push_back(std::log(times(i)));
    ly.push_back(std::log(q(i)));
  }
  if (lx.size() < 2) throw std::out_of_range("decay_slope: fewer than two samples in the window");
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) rss += std::pow(ly[i] - f.intercept - f.slope * lx[i], 2);
  f.residual = std::sqrt(rss / n);
  f.t_lo = std::exp(lx.front());
  f.t_hi = std::exp(lx.back());
  f.samples = static_cast<int>(lx.size());
  f.short_window = f.t_hi < 10.0 * f.t_lo;
  return f;
}

SlopeFit decay_slope(const Series& s, std::string_view quantity, double t_lo, double t_hi) {
  return decay_slope(column(s, "t"), column(s, quantity), t_lo, t_hi);
}

InstabilityProxies instability_proxies(const Series& s, double t_burn, double window) {
  if (s.size() < 2) throw std::invalid_argument("instability_proxies: need at least two samples");
  const Eigen::VectorXd t = column(s, "t");
  require_sorted(t, "instability_proxies");
  const Eigen::VectorXd d1 = column(s, "d1rho_l2");
  const Eigen::VectorXd gv = column(s, "grad_v_sq");
  const Eigen::VectorXd sv = column(s, "strat_surrogate");
  InstabilityProxies p;
  p.initial_d1rho = d1(0);
  p.min_d1rho = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < t.size(); ++i)
    if (t(i) >= t_burn) p.min_d1rho = std::min(p.min_d1rho, d1(i));
  const Eigen::VectorXd cum = cumulative(t, gv);
  p.cumulative_gradv = cum(cum.size() - 1);
  const double t_end = t(t.size() - 1);
  for (double a = t(0); a + window <= t_end + 1e-9 * window; a += window)
    p.gradv_increments.push_back(interpolate(t, cum, std::min(a + window, t_end)) - interpolate(t, cum, a));
  p.saturating = p.gradv_increments.size() >= 2;
  for (size_t i = 1; i < p.gradv_increments.size(); ++i)
    p.saturating = p.saturating && p.gradv_increments[i] < p.gradv_increments[i - 1];
  if (t_burn >= t(0) && t_burn <= t_end) {
    Eigen::VectorXd proxy(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) proxy(i) = d1(i) * d1(i) / sv(i);
    p.lowerbound_growth_k1 = proxy(proxy.size() - 1) / interpolate(t, proxy, t_burn);
  }
  return p;
}

}  // namespace bouss
