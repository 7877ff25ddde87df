#pragma once

#include <stdexcept>

#include <Eigen/Core>

#include "bouss/grid.hpp"

namespace bouss {

struct VelocityField {
  Field u1;
  Field u2;
};

struct SobolevIndex {
  int order = 0;
  explicit SobolevIndex(int k) : order(k) {
    if (k < 0 || k > 4) throw std::invalid_argument("SobolevIndex: order must lie in 0..4");
  }
};

// x2 runs along the column index in every array below.

// Centered differences inside, second-order one-sided at the walls.
template <typename Derived>
typename Derived::PlainObject ddx2_lines(const Eigen::MatrixBase<Derived>& a, double h) {
  const auto n = a.cols();
  typename Derived::PlainObject d(a.rows(), n);
  const double c = 0.5 / h;
  d.col(0) = c * (-3.0 * a.col(0) + 4.0 * a.col(1) - a.col(2));
  for (Eigen::Index j = 1; j + 1 < n; ++j) d.col(j) = c * (a.col(j + 1) - a.col(j - 1));
  d.col(n - 1) = c * (3.0 * a.col(n - 1) - 4.0 * a.col(n - 2) + a.col(n - 3));
  return d;
}

// Centered differences inside; wall columns left at zero.
template <typename Derived>
typename Derived::PlainObject ddx2_interior(const Eigen::MatrixBase<Derived>& a, double h) {
  const auto n = a.cols();
  typename Derived::PlainObject d = Derived::PlainObject::Zero(a.rows(), n);
  const double c = 0.5 / h;
  for (Eigen::Index j = 1; j + 1 < n; ++j) d.col(j) = c * (a.col(j + 1) - a.col(j - 1));
  return d;
}

// Three-point second difference inside, second-order one-sided at the walls.
template <typename Derived>
typename Derived::PlainObject d2dx2_lines(const Eigen::MatrixBase<Derived>& a, double h) {
  const auto n = a.cols();
  typename Derived::PlainObject d(a.rows(), n);
  const double c = 1.0 / (h * h);
  d.col(0) = c * (2.0 * a.col(0) - 5.0 * a.col(1) + 4.0 * a.col(2) - a.col(3));
  for (Eigen::Index j = 1; j + 1 < n; ++j) d.col(j) = c * (a.col(j + 1) - 2.0 * a.col(j) + a.col(j - 1));
  d.col(n - 1) = c * (2.0 * a.col(n - 1) - 5.0 * a.col(n - 2) + 4.0 * a.col(n - 3) - a.col(n - 4));
  return d;
}

// Trapezoid rule over x2 of each row.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> trapezoid_lines(const Eigen::MatrixBase<Derived>& a,
                                                                           double h) {
  const auto n = a.cols();
  return h * (a.rowwise().sum() - 0.5 * (a.col(0) + a.col(n - 1)));
}

SpectralField ddx1(const SpectralField& f);
Field ddx1(const Field& f);
Field ddx2(const Field& f);

double integrate(const Field& f);
double inner(const Field& a, const Field& b);
double l2_norm(const Field& f);
double l2_norm(const VelocityField& u);
double h_k_norm(const Field& f, SobolevIndex k);
double max_abs(const Field& f);

// Interior-node divergence; wall rows carry no-penetration and are left at zero.
Field divergence(const VelocityField& u);
// Sum of squared L2 norms of all first derivatives of both components.
double grad_sq(const VelocityField& u);

Field zeros_like(const Field& f);
VelocityField operator-(const VelocityField& a, const VelocityField& b);

// ||grad v|| with v the Stokes velocity driven by rho; defined with the elliptic solvers.
double stratification_surrogate(const Field& rho);

}  // namespace bouss
