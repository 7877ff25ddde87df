#pragma once

#include <memory>

#include <Eigen/Core>

#include "bouss/banded.hpp"
#include "bouss/fields.hpp"
#include "bouss/grid.hpp"

namespace bouss {

// Per-wavenumber operators act on the n2-2 interior nodes of an x2 line.
// Full-length profiles (n2 entries, walls included) are used at the interfaces;
// wall entries of a solution are zero.

enum class OperatorKind { biharmonic, crank_nicolson, helmholtz, leray };

// D2 - k^2 with homogeneous Dirichlet closure.
PentaMatrix<double> laplacian_matrix(int n2, int k);
// (D2 - k^2)^2 with clamped closure through the ghost value psi_{-1} = psi_1.
PentaMatrix<double> bilaplacian_matrix(int n2, int k);

struct BandedOperator {
  OperatorKind kind;
  int n2;
  int k;
  double param;
  PentaMatrix<double> matrix;
  BandedLU<double> lu;
};

// Factorizations are built once per (kind, n2, k, param) and shared; safe for
// concurrent use.
std::shared_ptr<const BandedOperator> banded_operator(OperatorKind kind, int n2, int k, double param = 0.0);

Eigen::VectorXcd interior_of(const Eigen::VectorXcd& full);
Eigen::VectorXcd with_walls(const Eigen::VectorXcd& inner);

// Vorticity (D2 - k^2) psi of a clamped profile; wall values from the ghost closure.
Eigen::VectorXcd clamped_vorticity(const Eigen::VectorXcd& psi, int k, double h);
Eigen::VectorXcd solve_biharmonic_mode(int k, const Eigen::VectorXcd& rhs, int n2);

SpectralField solve_biharmonic_clamped_spectral(const SpectralField& h);

// For clamped stream functions psi (k >= 1 modes): ||grad^perp psi||^2 from the
// interior form -<psi, (D2 - k^2) psi>, and ||grad grad^perp psi||^2 as the
// trapezoid norm of the wall-closed vorticity. The second equals <psi, P psi>
// with P the clamped bilaplacian.
double stream_kinetic(const SpectralField& psi);
double stream_enstrophy(const SpectralField& psi);
Field solve_biharmonic_clamped(const SpectralField& h);

struct StokesSolution {
  VelocityField v;
  Field psi;
  Field q;
};

// Stream function of the Stokes velocity forced by rho: clamped solve of Delta^2 Psi = d1 rho.
SpectralField stokes_stream_function(const SpectralField& rho_hat);
StokesSolution solve_stokes_buoyancy(const Field& rho);
// -Delta v + grad q + (0, rho) at interior nodes; wall rows zero.
VelocityField stokes_residual(const StokesSolution& s, const Field& rho);

struct LerayResult {
  VelocityField v;
  Field q;
};

// v = -grad q - f with v divergence-free and v2 = 0 at the walls. The map
// f -> -v is the orthogonal projection, so applying this twice returns -v.
LerayResult leray_project(const Field& f1, const Field& f2);

// (I - alpha (D2 - k^2)) y = rhs with y = 0 at both walls.
Eigen::VectorXd solve_helmholtz(int k, double alpha, const Eigen::VectorXd& rhs, double dx2);

}  // namespace bouss
