#include "bouss/grid.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace bouss {

namespace {

Eigen::FFT<double>& line_fft() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}

bool is_5_smooth(int n) {
  for (int p : {2, 3, 5})
    while (n % p == 0) n /= p;
  return n == 1;
}

}  // namespace

Eigen::VectorXd ChannelGrid::x2_weights() const {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n2, dx2);
  w(0) = w(n2 - 1) = 0.5 * dx2;
  return w;
}

int fft_friendly_size(int n) {
  int m = std::max(n, 1);
  while (!is_5_smooth(m)) ++m;
  return m;
}

ChannelGrid build_grid(int kmax, int n2) {
  if (kmax < 1) throw std::invalid_argument("build_grid: kmax must be >= 1, got " + std::to_string(kmax));
  if (n2 < 9) throw std::invalid_argument("build_grid: n2 must be >= 9, got " + std::to_string(n2));
  ChannelGrid g;
  g.kmax = kmax;
  g.n1 = fft_friendly_size(3 * kmax);
  g.n2 = n2;
  g.dx2 = 1.0 / (n2 - 1);
  g.x1.resize(g.n1);
  for (int i = 0; i < g.n1; ++i) g.x1(i) = g.dx1() * i;
  g.x2.resize(n2);
  for (int j = 0; j < n2; ++j) g.x2(j) = static_cast<double>(j) / (n2 - 1);
  g.x2(n2 - 1) = 1.0;
  return g;
}

GridPtr make_grid(int kmax, int n2) { return std::make_shared<const ChannelGrid>(build_grid(kmax, n2)); }

Field::Field(GridPtr g) : grid(std::move(g)), values(Eigen::MatrixXd::Zero(grid->n1, grid->n2)) {}

Field::Field(GridPtr g, Eigen::MatrixXd v) : grid(std::move(g)), values(std::move(v)) {
  if (values.rows() != grid->n1 || values.cols() != grid->n2)
    throw std::invalid_argument("Field: values shape does not match grid");
}

SpectralField::SpectralField(GridPtr g)
    : grid(std::move(g)), coeffs(Eigen::MatrixXcd::Zero(grid->kmax + 1, grid->n2)) {}

SpectralField::SpectralField(GridPtr g, Eigen::MatrixXcd c) : grid(std::move(g)), coeffs(std::move(c)) {
  if (coeffs.rows() != grid->kmax + 1 || coeffs.cols() != grid->n2)
    throw std::invalid_argument("SpectralField: coefficient shape does not match grid");
}

Eigen::MatrixXcd forward_lines(const Eigen::MatrixXd& values, int kmax) {
  const auto n1 = static_cast<int>(values.rows());
  const auto n2 = static_cast<int>(values.cols());
  auto& fft = line_fft();
  std::vector<cplx> in(n1), out(n1);
  Eigen::MatrixXcd c(kmax + 1, n2);
  const double scale = 1.0 / n1;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) in[i] = cplx(values(i, j), 0.0);
    fft.fwd(out, in);
    for (int k = 0; k <= kmax; ++k) c(k, j) = out[k] * scale;
    c(0, j) = cplx(c(0, j).real(), 0.0);
  }
  return c;
}

Eigen::MatrixXd inverse_lines(const Eigen::MatrixXcd& coeffs, int n1) {
  const auto kmax = static_cast<int>(coeffs.rows()) - 1;
  const auto n2 = static_cast<int>(coeffs.cols());
  auto& fft = line_fft();
  std::vector<cplx> in(n1), out(n1);
  Eigen::MatrixXd v(n1, n2);
  for (int j = 0; j < n2; ++j) {
    std::fill(in.begin(), in.end(), cplx(0.0, 0.0));
    in[0] = cplx(coeffs(0, j).real(), 0.0);
    for (int k = 1; k <= kmax; ++k) {
      in[k] = coeffs(k, j);
      in[n1 - k] = std::conj(coeffs(k, j));
    }
    fft.inv(out, in);
    for (int i = 0; i < n1; ++i) v(i, j) = out[i].real();
  }
  return v;
}

SpectralField to_spectral(const Field& f) {
  if (!f.values.allFinite()) throw std::invalid_argument("to_spectral: non-finite input");
  return SpectralField(f.grid, forward_lines(f.values, f.grid->kmax));
}

Field to_physical(const SpectralField& f) { return Field(f.grid, inverse_lines(f.coeffs, f.grid->n1)); }

SpectralField dealias(const SpectralField& f) {
  SpectralField out = f;
  const int cut = f.grid->dealias_cutoff();
  for (int k = cut + 1; k <= f.grid->kmax; ++k) out.coeffs.row(k).setZero();
  return out;
}

}  // namespace bouss
