#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fgl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Cross-matrix fiber X_[ij] = (X^(1)_ij, ..., X^(L)_ij).
using EntryVector = Eigen::VectorXd;

/// Ordered list of L symmetric p x p matrices.
///
/// Every matrix handed in from outside is symmetrized as (A + A^T)/2, so the
/// collection is exactly symmetric. Arithmetic between collections keeps
/// exact symmetry because it is entrywise.
class MatrixCollection {
 public:
  MatrixCollection() = default;

  /// Symmetrizes each matrix. Throws std::invalid_argument on an empty list,
  /// a non-square matrix or mismatched dimensions.
  explicit MatrixCollection(std::vector<Matrix> mats);

  static MatrixCollection zeros(std::size_t p, std::size_t num_classes);
  static MatrixCollection identity(std::size_t p, std::size_t num_classes);

  std::size_t dim() const { return p_; }
  std::size_t size() const { return mats_.size(); }
  bool empty() const { return mats_.empty(); }

  const Matrix& operator[](std::size_t l) const { return mats_[l]; }
  const std::vector<Matrix>& matrices() const { return mats_; }

  /// Replaces matrix l (symmetrized).
  void set(std::size_t l, const Matrix& m);
  /// Writes value into both (i,j) and (j,i) of matrix l.
  void set_entry(std::size_t l, std::size_t i, std::size_t j, double value);

  double norm() const;
  double squared_norm() const;

  MatrixCollection& operator+=(const MatrixCollection& other);
  MatrixCollection& operator-=(const MatrixCollection& other);
  MatrixCollection& operator*=(double s);
  /// this += alpha * other
  MatrixCollection& axpy(double alpha, const MatrixCollection& other);

  friend MatrixCollection operator+(MatrixCollection a, const MatrixCollection& b) { return a += b; }
  friend MatrixCollection operator-(MatrixCollection a, const MatrixCollection& b) { return a -= b; }
  friend MatrixCollection operator*(double s, MatrixCollection a) { return a *= s; }
  friend MatrixCollection operator*(MatrixCollection a, double s) { return a *= s; }
  friend MatrixCollection operator/(MatrixCollection a, double s) { return a *= 1.0 / s; }
  friend MatrixCollection operator-(MatrixCollection a) { return a *= -1.0; }

  bool same_shape(const MatrixCollection& other) const {
    return p_ == other.p_ && mats_.size() == other.mats_.size();
  }

 private:
  std::vector<Matrix> mats_;
  std::size_t p_ = 0;
};

/// Eigenvalue decomposition A = Q Diag(d) Q^T with d sorted descending.
struct EigenFactorization {
  Matrix Q;
  Vector d;

  std::size_t dim() const { return static_cast<std::size_t>(d.size()); }
  /// Q Diag(f(d)) Q^T, symmetrized.
  template <class F>
  Matrix spectral_map(F&& f) const {
    Vector fd = d.unaryExpr(std::forward<F>(f));
    Matrix out = Q * fd.asDiagonal() * Q.transpose();
    return 0.5 * (out + out.transpose());
  }
};

/// Throws std::invalid_argument for non-square input or non-finite entries.
EigenFactorization sym_eig(const Matrix& a);

/// Sum over l of <X^(l), Y^(l)>.
double collection_inner(const MatrixCollection& x, const MatrixCollection& y);

/// Throws std::out_of_range for indices >= p.
EntryVector fiber_view(const MatrixCollection& x, std::size_t i, std::size_t j);

/// Writes fiber v into entries (i,j) and (j,i) of every matrix.
void scatter_fiber(MatrixCollection& x, std::size_t i, std::size_t j, const EntryVector& v);

/// Throws std::invalid_argument unless the shapes match.
void require_same_shape(const MatrixCollection& a, const MatrixCollection& b, const char* what);

}  // namespace fgl
