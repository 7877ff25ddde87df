#include "bouss/fields.hpp"

#include <cmath>

namespace bouss {

SpectralField ddx1(const SpectralField& f) {
  SpectralField out = f;
  for (int k = 0; k <= f.grid->kmax; ++k) out.coeffs.row(k) *= cplx(0.0, k);
  return out;
}

Field ddx1(const Field& f) { return to_physical(ddx1(to_spectral(f))); }

Field ddx2(const Field& f) { return Field(f.grid, ddx2_lines(f.values, f.grid->dx2)); }

double integrate(const Field& f) {
  return f.grid->dx1() * trapezoid_lines(f.values, f.grid->dx2).sum();
}

double inner(const Field& a, const Field& b) {
  return a.grid->dx1() * trapezoid_lines(a.values.cwiseProduct(b.values), a.grid->dx2).sum();
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

double l2_norm(const VelocityField& u) { return std::sqrt(inner(u.u1, u.u1) + inner(u.u2, u.u2)); }

double h_k_norm(const Field& f, SobolevIndex k) {
  const auto& g = *f.grid;
  const SpectralField fh = to_spectral(f);
  double total = 0.0;
  SpectralField d1 = fh;
  for (int a = 0; a <= k.order; ++a) {
    Eigen::MatrixXd d = a == 0 ? f.values : inverse_lines(d1.coeffs, g.n1);
    for (int b = 0; a + b <= k.order; ++b) {
      if (b > 0) d = ddx2_lines(d, g.dx2);
      const Field part(f.grid, d);
      total += inner(part, part);
    }
    d1 = ddx1(d1);
  }
  return std::sqrt(total);
}

double max_abs(const Field& f) { return f.values.cwiseAbs().maxCoeff(); }

Field divergence(const VelocityField& u) {
  const auto& g = *u.u1.grid;
  Eigen::MatrixXd d = ddx1(u.u1).values + ddx2_interior(u.u2.values, g.dx2);
  d.col(0).setZero();
  d.col(g.n2 - 1).setZero();
  return Field(u.u1.grid, d);
}

double grad_sq(const VelocityField& u) {
  double s = 0.0;
  for (const Field* c : {&u.u1, &u.u2}) {
    const Field a = ddx1(*c);
    const Field b = ddx2(*c);
    s += inner(a, a) + inner(b, b);
  }
  return s;
}

Field zeros_like(const Field& f) { return Field(f.grid); }

VelocityField operator-(const VelocityField& a, const VelocityField& b) {
  return {Field(a.u1.grid, a.u1.values - b.u1.values), Field(a.u2.grid, a.u2.values - b.u2.values)};
}

}  // namespace bouss
