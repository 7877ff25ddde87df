#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace bouss {

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Square matrix with half-bandwidth 2, stored by diagonals: band(i, 2 + d) = A(i, i + d).
template <typename Scalar>
struct PentaMatrix {
  using Band = Eigen::Matrix<Scalar, Eigen::Dynamic, 5>;
  Band band;

  PentaMatrix() = default;
  explicit PentaMatrix(Eigen::Index n) : band(Band::Zero(n, 5)) {}

  Eigen::Index size() const { return band.rows(); }
  Scalar& at(Eigen::Index i, Eigen::Index j) { return band(i, 2 + (j - i)); }
  Scalar at(Eigen::Index i, Eigen::Index j) const {
    const auto d = j - i;
    return (d < -2 || d > 2) ? Scalar(0) : band(i, 2 + d);
  }

  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply(const Eigen::MatrixBase<Derived>& x) const {
    const auto n = size();
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      typename Derived::Scalar acc(0);
      for (int d = -2; d <= 2; ++d) {
        const auto j = i + d;
        if (j >= 0 && j < n) acc += band(i, 2 + d) * x(j);
      }
      y(i) = acc;
    }
    return y;
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
    const auto n = size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (int d = -2; d <= 2; ++d)
        if (i + d >= 0 && i + d < n) a(i, i + d) = band(i, 2 + d);
    return a;
  }

  PentaMatrix& operator+=(const PentaMatrix& o) {
    band += o.band;
    return *this;
  }
  PentaMatrix& operator*=(Scalar s) {
    band *= s;
    return *this;
  }
  friend PentaMatrix operator+(PentaMatrix a, const PentaMatrix& b) { return a += b; }
  friend PentaMatrix operator*(Scalar s, PentaMatrix a) { return a *= s; }
  friend PentaMatrix operator-(PentaMatrix a, const PentaMatrix& b) {
    a.band -= b.band;
    return a;
  }
  static PentaMatrix identity(Eigen::Index n) {
    PentaMatrix m(n);
    m.band.col(2).setOnes();
    return m;
  }
};

// LU without pivoting. The operators factored here are symmetric definite or
// diagonally dominant, where pivoting is unnecessary.
template <typename Scalar>
class BandedLU {
 public:
  BandedLU() = default;
  explicit BandedLU(const PentaMatrix<Scalar>& a) { factor(a); }

  void factor(const PentaMatrix<Scalar>& a) {
    lu_ = a.band;
    const auto n = lu_.rows();
    double scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(lu_(i, 2)));
    if (scale == 0.0) throw SingularSystemError("banded factorization: zero matrix");
    for (Eigen::Index p = 0; p < n; ++p) {
      const Scalar piv = lu_(p, 2);
      if (!(std::abs(piv) > 1e-14 * scale))
        throw SingularSystemError("banded factorization: vanishing pivot at row " + std::to_string(p));
      for (int r = 1; r <= 2 && p + r < n; ++r) {
        // element (p+r, p) sits at band(p+r, 2-r)
        const Scalar m = lu_(p + r, 2 - r) / piv;
        lu_(p + r, 2 - r) = m;
        for (int c = 1; c <= 2 && p + c < n; ++c) lu_(p + r, 2 - r + c) -= m * lu_(p, 2 + c);
      }
    }
  }

  Eigen::Index size() const { return lu_.rows(); }

  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> solve(const Eigen::MatrixBase<Derived>& b) const {
    using T = typename Derived::Scalar;
    const auto n = lu_.rows();
    if (b.size() != n) throw std::invalid_argument("banded solve: size mismatch");
    Eigen::Matrix<T, Eigen::Dynamic, 1> x = b;
    for (Eigen::Index i = 1; i < n; ++i) {
      x(i) -= lu_(i, 1) * x(i - 1);
      if (i >= 2) x(i) -= lu_(i, 0) * x(i - 2);
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      if (i + 1 < n) x(i) -= lu_(i, 3) * x(i + 1);
      if (i + 2 < n) x(i) -= lu_(i, 4) * x(i + 2);
      x(i) /= lu_(i, 2);
    }
    return x;
  }

 private:
  typename PentaMatrix<Scalar>::Band lu_;
};

}  // namespace bouss
