#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace hdg5 {

/// LU factorization with partial pivoting of an n x n band matrix with kl
/// sub-diagonals and ku super-diagonals, stored column-wise in the LAPACK
/// "gbtrf" layout (kl extra rows hold the fill-in from row interchanges).
template <typename Scalar>
class BandedLu {
 public:
  BandedLu(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(ld_) * n, Scalar(0)), piv_(n) {}

  int size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  bool in_band(int i, int j) const { return i - j <= kl_ && j - i <= ku_; }

  /// Entry (i, j) of the matrix before factorization; must lie inside the band.
  Scalar& operator()(int i, int j) { return at(i, j); }

  void factorize() {
    using std::abs;
    for (int j = 0; j < n_; ++j) {
      const int last_row = std::min(n_ - 1, j + kl_);
      const int last_col = std::min(n_ - 1, j + ku_ + kl_);
      int p = j;
      for (int i = j + 1; i <= last_row; ++i)
        if (abs(at(i, j)) > abs(at(p, j))) p = i;
      piv_[j] = p;
      if (at(p, j) == Scalar(0)) throw std::runtime_error("BandedLu: matrix is singular");
      if (p != j)
        for (int c = j; c <= last_col; ++c) std::swap(at(j, c), at(p, c));
      const Scalar pivot = at(j, j);
      for (int i = j + 1; i <= last_row; ++i) {
        const Scalar l = (at(i, j) /= pivot);
        if (l == Scalar(0)) continue;
        for (int c = j + 1; c <= last_col; ++c) at(i, c) -= l * at(j, c);
      }
    }
    factorized_ = true;
  }

  /// Solves A X = B in place, column by column.
  template <typename Derived>
  void solve_in_place(Eigen::MatrixBase<Derived>& b) const {
    if (!factorized_) throw std::logic_error("BandedLu: factorize() first");
    for (int col = 0; col < b.cols(); ++col) {
      for (int j = 0; j < n_; ++j) {
        if (piv_[j] != j) std::swap(b(j, col), b(piv_[j], col));
        const int last_row = std::min(n_ - 1, j + kl_);
        for (int i = j + 1; i <= last_row; ++i) b(i, col) -= at(i, j) * b(j, col);
      }
      for (int j = n_ - 1; j >= 0; --j) {
        b(j, col) /= at(j, j);
        const int first_row = std::max(0, j - ku_ - kl_);
        for (int i = first_row; i < j; ++i) b(i, col) -= at(i, j) * b(j, col);
      }
    }
  }

 private:
  Scalar& at(int i, int j) { return ab_[static_cast<std::size_t>(j) * ld_ + (kl_ + ku_ + i - j)]; }
  const Scalar& at(int i, int j) const { return ab_[static_cast<std::size_t>(j) * ld_ + (kl_ + ku_ + i - j)]; }

  int n_, kl_, ku_, ld_;
  std::vector<Scalar> ab_;
  std::vector<int> piv_;
  bool factorized_ = false;
};

}  // namespace hdg5
