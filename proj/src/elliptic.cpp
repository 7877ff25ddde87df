#include "bouss/elliptic.hpp"

#include <bit>
#include <cstdint>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace bouss {

namespace {

using Key = std::tuple<int, int, int, std::uint64_t>;

// Mode weights for sums over the half spectrum of a real field.
double mode_weight(int k) { return k == 0 ? 1.0 : 2.0; }

PentaMatrix<double> second_difference(int n, double h) {
  PentaMatrix<double> m(n);
  const double c = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    m.at(i, i) = -2.0 * c;
    if (i > 0) m.at(i, i - 1) = c;
    if (i + 1 < n) m.at(i, i + 1) = c;
  }
  return m;
}

PentaMatrix<double> clamped_fourth_difference(int n, double h) {
  PentaMatrix<double> m(n);
  const double c = 1.0 / (h * h * h * h);
  const double stencil[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
  for (int i = 0; i < n; ++i)
    for (int d = -2; d <= 2; ++d)
      if (i + d >= 0 && i + d < n) m.at(i, i + d) = c * stencil[d + 2];
  m.at(0, 0) += c;
  m.at(n - 1, n - 1) += c;
  return m;
}

// k^2 W + h Dc^T Dc on all n2 nodes, Dc the centered difference evaluated at interior nodes.
PentaMatrix<double> leray_matrix(int n2, int k) {
  const double h = 1.0 / (n2 - 1);
  PentaMatrix<double> m(n2);
  for (int j = 0; j < n2; ++j) m.at(j, j) = k * k * ((j == 0 || j == n2 - 1) ? 0.5 * h : h);
  const double c = h / (4.0 * h * h);
  for (int j = 1; j + 1 < n2; ++j) {
    m.at(j - 1, j - 1) += c;
    m.at(j + 1, j + 1) += c;
    m.at(j - 1, j + 1) -= c;
    m.at(j + 1, j - 1) -= c;
  }
  return m;
}

std::shared_ptr<const BandedOperator> build_operator(OperatorKind kind, int n2, int k, double param) {
  const int n = n2 - 2;
  PentaMatrix<double> a;
  switch (kind) {
    case OperatorKind::biharmonic:
      a = bilaplacian_matrix(n2, k);
      break;
    case OperatorKind::crank_nicolson:
      // Negated so the system is positive definite: -(L - dt/2 P).
      a = 0.5 * param * bilaplacian_matrix(n2, k) - laplacian_matrix(n2, k);
      break;
    case OperatorKind::helmholtz:
      a = PentaMatrix<double>::identity(n) - param * laplacian_matrix(n2, k);
      break;
    case OperatorKind::leray:
      a = leray_matrix(n2, k);
      break;
  }
  auto op = std::make_shared<BandedOperator>(BandedOperator{kind, n2, k, param, a, BandedLU<double>()});
  op->lu.factor(op->matrix);
  return op;
}

Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& f, double h) {
  Eigen::VectorXd out(f.size());
  out(0) = 0.0;
  for (Eigen::Index j = 1; j < f.size(); ++j) out(j) = out(j - 1) + 0.5 * h * (f(j) + f(j - 1));
  return out;
}

Eigen::VectorXd zero_mean(const Eigen::VectorXd& f, double h) {
  const double mean = h * (f.sum() - 0.5 * (f(0) + f(f.size() - 1)));
  return f.array() - mean;
}

}  // namespace

PentaMatrix<double> laplacian_matrix(int n2, int k) {
  const double h = 1.0 / (n2 - 1);
  PentaMatrix<double> m = second_difference(n2 - 2, h);
  m.band.col(2).array() -= static_cast<double>(k) * k;
  return m;
}

PentaMatrix<double> bilaplacian_matrix(int n2, int k) {
  const int n = n2 - 2;
  const double h = 1.0 / (n2 - 1);
  const double k2 = static_cast<double>(k) * k;
  PentaMatrix<double> m = clamped_fourth_difference(n, h) + (-2.0 * k2) * second_difference(n, h);
  m.band.col(2).array() += k2 * k2;
  return m;
}

std::shared_ptr<const BandedOperator> banded_operator(OperatorKind kind, int n2, int k, double param) {
  static std::mutex mtx;
  static std::map<Key, std::shared_ptr<const BandedOperator>> cache;
  const Key key{static_cast<int>(kind), n2, k, std::bit_cast<std::uint64_t>(param)};
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto op = build_operator(kind, n2, k, param);
  std::lock_guard<std::mutex> lock(mtx);
  return cache.emplace(key, op).first->second;
}

Eigen::VectorXcd interior_of(const Eigen::VectorXcd& full) { return full.segment(1, full.size() - 2); }

Eigen::VectorXcd with_walls(const Eigen::VectorXcd& inner) {
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(inner.size() + 2);
  full.segment(1, inner.size()) = inner;
  return full;
}

Eigen::VectorXcd clamped_vorticity(const Eigen::VectorXcd& psi, int k, double h) {
  const auto n2 = psi.size();
  const double c = 1.0 / (h * h);
  const double k2 = static_cast<double>(k) * k;
  Eigen::VectorXcd w(n2);
  w(0) = 2.0 * c * psi(1);
  w(n2 - 1) = 2.0 * c * psi(n2 - 2);
  for (Eigen::Index j = 1; j + 1 < n2; ++j) w(j) = c * (psi(j + 1) - 2.0 * psi(j) + psi(j - 1)) - k2 * psi(j);
  return w;
}

Eigen::VectorXcd solve_biharmonic_mode(int k, const Eigen::VectorXcd& rhs, int n2) {
  const auto op = banded_operator(OperatorKind::biharmonic, n2, k);
  return with_walls(op->lu.solve(interior_of(rhs)));
}

SpectralField solve_biharmonic_clamped_spectral(const SpectralField& h) {
  if (!h.coeffs.allFinite()) throw std::invalid_argument("solve_biharmonic_clamped: non-finite input");
  const int n2 = h.grid->n2;
  SpectralField psi(h.grid);
  for (int k = 0; k <= h.grid->kmax; ++k) {
    const Eigen::VectorXcd r = h.coeffs.row(k).transpose();
    if (r.isZero(0.0)) continue;
    psi.coeffs.row(k) = solve_biharmonic_mode(k, r, n2).transpose();
  }
  return psi;
}

Field solve_biharmonic_clamped(const SpectralField& h) { return to_physical(solve_biharmonic_clamped_spectral(h)); }

double stream_kinetic(const SpectralField& psi) {
  const int n2 = psi.grid->n2;
  const double h = psi.grid->dx2;
  double s = 0.0;
  for (int k = 1; k <= psi.grid->kmax; ++k) {
    const Eigen::VectorXcd p = interior_of(psi.coeffs.row(k).transpose());
    const Eigen::VectorXcd lp = laplacian_matrix(n2, k).apply(p);
    s -= mode_weight(k) * h * p.dot(lp).real();
  }
  return ChannelGrid::x1_period * s;
}

double stream_enstrophy(const SpectralField& psi) {
  const double h = psi.grid->dx2;
  double s = 0.0;
  for (int k = 1; k <= psi.grid->kmax; ++k) {
    const Eigen::VectorXcd w = clamped_vorticity(psi.coeffs.row(k).transpose(), k, h);
    s += mode_weight(k) * h * (w.squaredNorm() - 0.5 * (std::norm(w(0)) + std::norm(w(w.size() - 1))));
  }
  return ChannelGrid::x1_period * s;
}

SpectralField stokes_stream_function(const SpectralField& rho_hat) {
  SpectralField rhs = ddx1(rho_hat);
  rhs.coeffs.row(0).setZero();
  return solve_biharmonic_clamped_spectral(rhs);
}

StokesSolution solve_stokes_buoyancy(const Field& rho) {
  const auto& g = *rho.grid;
  const SpectralField rho_hat = to_spectral(rho);
  const SpectralField psi = stokes_stream_function(rho_hat);

  SpectralField v1(rho.grid, -ddx2_interior(psi.coeffs, g.dx2));
  SpectralField v2 = ddx1(psi);

  SpectralField q(rho.grid);
  for (int k = 1; k <= g.kmax; ++k) {
    const Eigen::VectorXcd w = clamped_vorticity(psi.coeffs.row(k).transpose(), k, g.dx2);
    const Eigen::RowVectorXcd dw = ddx2_lines(w.transpose(), g.dx2);
    q.coeffs.row(k) = -dw / cplx(0.0, k);
  }
  const Eigen::VectorXd rho0 = rho_hat.coeffs.row(0).real().transpose();
  q.coeffs.row(0) = zero_mean(cumulative_trapezoid(-rho0, g.dx2), g.dx2).transpose().cast<cplx>();

  return {{to_physical(v1), to_physical(v2)}, to_physical(psi), to_physical(q)};
}

VelocityField stokes_residual(const StokesSolution& s, const Field& rho) {
  const auto& g = *rho.grid;
  const double c = 1.0 / (g.dx2 * g.dx2);
  const SpectralField v1 = to_spectral(s.v.u1);
  const SpectralField v2 = to_spectral(s.v.u2);
  const SpectralField q = to_spectral(s.q);
  const SpectralField r = to_spectral(rho);
  const SpectralField dq1 = ddx1(q);
  const Eigen::MatrixXcd dq2 = ddx2_interior(q.coeffs, g.dx2);
  SpectralField r1(rho.grid), r2(rho.grid);
  for (int k = 0; k <= g.kmax; ++k) {
    const double k2 = static_cast<double>(k) * k;
    for (int j = 1; j + 1 < g.n2; ++j) {
      const cplx lap1 = c * (v1.coeffs(k, j + 1) - 2.0 * v1.coeffs(k, j) + v1.coeffs(k, j - 1)) - k2 * v1.coeffs(k, j);
      const cplx lap2 = c * (v2.coeffs(k, j + 1) - 2.0 * v2.coeffs(k, j) + v2.coeffs(k, j - 1)) - k2 * v2.coeffs(k, j);
      r1.coeffs(k, j) = -lap1 + dq1.coeffs(k, j);
      r2.coeffs(k, j) = -lap2 + dq2(k, j) + r.coeffs(k, j);
    }
  }
  return {to_physical(r1), to_physical(r2)};
}

LerayResult leray_project(const Field& f1, const Field& f2) {
  const auto& g = *f1.grid;
  const double h = g.dx2;
  const SpectralField a = to_spectral(f1);
  const SpectralField b = to_spectral(f2);
  SpectralField v1(f1.grid), v2(f1.grid), q(f1.grid);

  for (int k = 1; k <= g.kmax; ++k) {
    const auto op = banded_operator(OperatorKind::leray, g.n2, k);
    const Eigen::VectorXcd fa = a.coeffs.row(k).transpose();
    const Eigen::VectorXcd fb = b.coeffs.row(k).transpose();
    const cplx ik(0.0, k);
    Eigen::VectorXcd rhs(g.n2);
    for (int j = 0; j < g.n2; ++j) {
      const double w = (j == 0 || j == g.n2 - 1) ? 0.5 * h : h;
      // -h Dc^T f2 with f2 read at interior nodes only
      cplx dt(0.0, 0.0);
      if (j - 1 >= 1) dt += fb(j - 1);
      if (j + 1 <= g.n2 - 2) dt -= fb(j + 1);
      rhs(j) = ik * w * fa(j) - h * dt / (2.0 * h);
    }
    const Eigen::VectorXcd qk = op->lu.solve(rhs);
    q.coeffs.row(k) = qk.transpose();
    for (int j = 0; j < g.n2; ++j) {
      v1.coeffs(k, j) = -fa(j) - ik * qk(j);
      v2.coeffs(k, j) = (j == 0 || j == g.n2 - 1) ? cplx(0.0, 0.0) : -fb(j) - (qk(j + 1) - qk(j - 1)) / (2.0 * h);
    }
  }
  const Eigen::VectorXd f10 = a.coeffs.row(0).real().transpose();
  const Eigen::VectorXd f20 = b.coeffs.row(0).real().transpose();
  v1.coeffs.row(0) = (-f10).transpose().cast<cplx>();
  q.coeffs.row(0) = zero_mean(cumulative_trapezoid(-f20, h), h).transpose().cast<cplx>();

  return {{to_physical(v1), to_physical(v2)}, to_physical(q)};
}

Eigen::VectorXd solve_helmholtz(int k, double alpha, const Eigen::VectorXd& rhs, double dx2) {
  if (alpha < 0.0) throw std::invalid_argument("solve_helmholtz: alpha must be >= 0");
  const int n2 = static_cast<int>(rhs.size());
  if (std::abs(dx2 * (n2 - 1) - 1.0) > 1e-12) throw std::invalid_argument("solve_helmholtz: dx2 does not match rhs length");
  const auto op = banded_operator(OperatorKind::helmholtz, n2, k, alpha);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n2);
  y.segment(1, n2 - 2) = op->lu.solve(rhs.segment(1, n2 - 2));
  return y;
}

double stratification_surrogate(const Field& rho) {
  return std::sqrt(stream_enstrophy(stokes_stream_function(to_spectral(rho))));
}

}  // namespace bouss
