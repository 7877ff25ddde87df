#pragma once

#include <complex>
#include <memory>

#include <Eigen/Core>

namespace bouss {

using cplx = std::complex<double>;
using Profile = Eigen::VectorXd;

// Discretization of T x (0,1): Fourier in x1 (period 2*pi), uniform nodes in x2
// with both walls included.
struct ChannelGrid {
  int kmax = 0;
  int n1 = 0;
  int n2 = 0;
  double dx2 = 0.0;
  Eigen::VectorXd x1;
  Eigen::VectorXd x2;

  static constexpr double x1_period = 6.283185307179586476925286766559;

  double dx1() const { return x1_period / n1; }
  int interior() const { return n2 - 2; }
  // Trapezoid weights in x2 (sum to 1).
  Eigen::VectorXd x2_weights() const;
  // Largest wavenumber kept by the 2/3 rule.
  int dealias_cutoff() const { return n1 / 3; }
};

using GridPtr = std::shared_ptr<const ChannelGrid>;

// Smallest integer >= n whose only prime factors are 2, 3 and 5.
int fft_friendly_size(int n);

ChannelGrid build_grid(int kmax, int n2);
GridPtr make_grid(int kmax, int n2);

// Physical-space scalar; values(i, j) sits at (x1[i], x2[j]).
struct Field {
  GridPtr grid;
  Eigen::MatrixXd values;

  Field() = default;
  explicit Field(GridPtr g);
  Field(GridPtr g, Eigen::MatrixXd v);
};

// Hermitian half-spectrum; coeffs(k, j) for k = 0..kmax.
struct SpectralField {
  GridPtr grid;
  Eigen::MatrixXcd coeffs;

  SpectralField() = default;
  explicit SpectralField(GridPtr g);
  SpectralField(GridPtr g, Eigen::MatrixXcd c);
};

SpectralField to_spectral(const Field& f);
Field to_physical(const SpectralField& f);
SpectralField dealias(const SpectralField& f);

// Line transforms used by the kernels above; x2 runs along columns.
Eigen::MatrixXcd forward_lines(const Eigen::MatrixXd& values, int kmax);
Eigen::MatrixXd inverse_lines(const Eigen::MatrixXcd& coeffs, int n1);

}  // namespace bouss
