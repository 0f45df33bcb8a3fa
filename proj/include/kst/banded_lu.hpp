#pragma once

// Banded Gaussian elimination with partial pivoting.

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kst {

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(Eigen::Index column, double pivot)
      : std::runtime_error("singular matrix: pivot " + std::to_string(pivot) + " in column " + std::to_string(column)),
        column_(column) {}

  Eigen::Index column() const { return column_; }

 private:
  Eigen::Index column_;
};

/// Square matrix with `lower` sub- and `upper` super-diagonals. Row i stores
/// columns [i - lower, i + lower + upper]; the extra `lower` slots take the
/// fill-in produced by row exchanges.
template <typename Scalar>
class BandMatrix {
 public:
  BandMatrix(Eigen::Index n, Eigen::Index lower, Eigen::Index upper)
      : n_(n), lower_(lower), upper_(upper), data_(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, 2 * lower + upper + 1)) {}

  Eigen::Index rows() const { return n_; }
  Eigen::Index lower() const { return lower_; }
  Eigen::Index upper() const { return upper_; }

  bool in_band(Eigen::Index i, Eigen::Index j) const { return j >= i - lower_ && j <= i + lower_ + upper_; }

  Scalar& operator()(Eigen::Index i, Eigen::Index j) { return data_(i, j - i + lower_); }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const {
    return in_band(i, j) && j >= 0 && j < n_ ? data_(i, j - i + lower_) : Scalar(0);
  }

  void setZero() { data_.setZero(); }

 private:
  Eigen::Index n_, lower_, upper_;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> data_;
};

/// Solves A x = b in place of a copy of A. Throws SingularMatrixError with the
/// column of the first vanishing pivot.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> band_solve(BandMatrix<Scalar> a, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b) {
  using std::abs;
  const Eigen::Index n = a.rows();
  const Eigen::Index kl = a.lower();
  const Eigen::Index width = a.lower() + a.upper();

  Scalar scale(0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = std::max<Eigen::Index>(0, i - kl); j <= std::min(n - 1, i + width); ++j)
      scale = std::max(scale, abs(a(i, j)));
  const Scalar tiny = scale * Scalar(n) * std::numeric_limits<Scalar>::epsilon();

  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index last_row = std::min(n - 1, c + kl);
    const Eigen::Index last_col = std::min(n - 1, c + width);
    Eigen::Index p = c;
    for (Eigen::Index r = c + 1; r <= last_row; ++r)
      if (abs(a(r, c)) > abs(a(p, c))) p = r;
    if (!(abs(a(p, c)) > tiny)) throw SingularMatrixError(c, static_cast<double>(a(p, c)));
    if (p != c) {
      for (Eigen::Index j = c; j <= last_col; ++j) std::swap(a(p, j), a(c, j));
      std::swap(b[p], b[c]);
    }
    for (Eigen::Index r = c + 1; r <= last_row; ++r) {
      const Scalar l = a(r, c) / a(c, c);
      if (l == Scalar(0)) continue;
      for (Eigen::Index j = c; j <= last_col; ++j) a(r, j) -= l * a(c, j);
      b[r] -= l * b[c];
    }
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    Scalar s = b[i];
    for (Eigen::Index j = i + 1; j <= std::min(n - 1, i + width); ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

}  // namespace kst
