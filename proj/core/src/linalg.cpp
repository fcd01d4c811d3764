#include "fgl/linalg.hpp"

#include <cmath>
#include <string>

namespace fgl {

MatrixCollection::MatrixCollection(std::vector<Matrix> mats) : mats_(std::move(mats)) {
  if (mats_.empty()) throw std::invalid_argument("MatrixCollection: empty list");
  p_ = static_cast<std::size_t>(mats_.front().rows());
  for (auto& m : mats_) {
    if (m.rows() != m.cols())
      throw std::invalid_argument("MatrixCollection: matrix is not square");
    if (static_cast<std::size_t>(m.rows()) != p_)
      throw std::invalid_argument("MatrixCollection: matrices differ in dimension");
    m = 0.5 * (m + m.transpose()).eval();
  }
}

MatrixCollection MatrixCollection::zeros(std::size_t p, std::size_t num_classes) {
  const auto n = static_cast<Eigen::Index>(p);
  return MatrixCollection(std::vector<Matrix>(num_classes, Matrix::Zero(n, n)));
}

MatrixCollection MatrixCollection::identity(std::size_t p, std::size_t num_classes) {
  const auto n = static_cast<Eigen::Index>(p);
  return MatrixCollection(std::vector<Matrix>(num_classes, Matrix::Identity(n, n)));
}

void MatrixCollection::set(std::size_t l, const Matrix& m) {
  if (l >= mats_.size()) throw std::out_of_range("MatrixCollection::set: class index");
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != p_)
    throw std::invalid_argument("MatrixCollection::set: shape mismatch");
  mats_[l] = 0.5 * (m + m.transpose());
}

void MatrixCollection::set_entry(std::size_t l, std::size_t i, std::size_t j, double value) {
  if (l >= mats_.size() || i >= p_ || j >= p_)
    throw std::out_of_range("MatrixCollection::set_entry: index");
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  mats_[l](ii, jj) = value;
  mats_[l](jj, ii) = value;
}

double MatrixCollection::squared_norm() const {
  double s = 0.0;
  for (const auto& m : mats_) s += m.squaredNorm();
  return s;
}

double MatrixCollection::norm() const { return std::sqrt(squared_norm()); }

MatrixCollection& MatrixCollection::operator+=(const MatrixCollection& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t l = 0; l < mats_.size(); ++l) mats_[l] += other.mats_[l];
  return *this;
}

MatrixCollection& MatrixCollection::operator-=(const MatrixCollection& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t l = 0; l < mats_.size(); ++l) mats_[l] -= other.mats_[l];
  return *this;
}

MatrixCollection& MatrixCollection::operator*=(double s) {
  for (auto& m : mats_) m *= s;
  return *this;
}

MatrixCollection& MatrixCollection::axpy(double alpha, const MatrixCollection& other) {
  require_same_shape(*this, other, "axpy");
  for (std::size_t l = 0; l < mats_.size(); ++l) mats_[l] += alpha * other.mats_[l];
  return *this;
}

void require_same_shape(const MatrixCollection& a, const MatrixCollection& b, const char* what) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(what) + ": collection shape mismatch");
}

EigenFactorization sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig: matrix is not square");
  if (!a.allFinite()) throw std::invalid_argument("sym_eig: non-finite entry");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver failed");
  // Eigen returns ascending order; flip to descending.
  EigenFactorization f;
  f.d = solver.eigenvalues().reverse();
  f.Q = solver.eigenvectors().rowwise().reverse();
  return f;
}

double collection_inner(const MatrixCollection& x, const MatrixCollection& y) {
  require_same_shape(x, y, "collection_inner");
  double s = 0.0;
  for (std::size_t l = 0; l < x.size(); ++l) s += x[l].cwiseProduct(y[l]).sum();
  return s;
}

EntryVector fiber_view(const MatrixCollection& x, std::size_t i, std::size_t j) {
  if (i >= x.dim() || j >= x.dim()) throw std::out_of_range("fiber_view: index out of range");
  EntryVector v(static_cast<Eigen::Index>(x.size()));
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  for (std::size_t l = 0; l < x.size(); ++l) v(static_cast<Eigen::Index>(l)) = x[l](ii, jj);
  return v;
}

void scatter_fiber(MatrixCollection& x, std::size_t i, std::size_t j, const EntryVector& v) {
  if (static_cast<std::size_t>(v.size()) != x.size())
    throw std::invalid_argument("scatter_fiber: fiber length differs from L");
  for (std::size_t l = 0; l < x.size(); ++l) x.set_entry(l, i, j, v(static_cast<Eigen::Index>(l)));
}

}  // namespace fgl
