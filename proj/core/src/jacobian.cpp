#include "fgl/jacobian.hpp"

#include <cmath>
#include <stdexcept>

#include "fgl/proximal.hpp"

namespace fgl {

Matrix FusedProxJacobian::dense() const {
  const auto n = static_cast<Eigen::Index>(length());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t b = 0; b < block_start.size(); ++b) {
    const Eigen::Index lo = block_start[b];
    const Eigen::Index hi = b + 1 < block_start.size() ? block_start[b + 1] : n;
    const double w = 1.0 / static_cast<double>(hi - lo);
    for (Eigen::Index r = lo; r < hi; ++r)
      for (Eigen::Index c = lo; c < hi; ++c) m(r, c) = upsilon(r) * w;
  }
  return m;
}

FusedProxJacobian fused_jacobian(const EntryVector& v, double lambda1, double lambda2) {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0))
    throw std::invalid_argument("fused_jacobian: penalties must be nonnegative");
  const EntryVector x = tv_chain_prox(v, lambda2);
  FusedProxJacobian j;
  j.upsilon = Vector::Zero(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i == 0 || x(i) != x(i - 1)) j.block_start.push_back(static_cast<int>(i));
    j.upsilon(i) = std::abs(x(i)) > lambda1 ? 1.0 : 0.0;
  }
  return j;
}

EntryVector fused_jacobian_apply(const FusedProxJacobian& j, const EntryVector& w) {
  if (static_cast<std::size_t>(w.size()) != j.length())
    throw std::invalid_argument("fused_jacobian_apply: length mismatch");
  const auto n = static_cast<Eigen::Index>(j.length());
  EntryVector out(n);
  for (std::size_t b = 0; b < j.block_start.size(); ++b) {
    const Eigen::Index lo = j.block_start[b];
    const Eigen::Index hi = b + 1 < j.block_start.size() ? j.block_start[b + 1] : n;
    const double mean = w.segment(lo, hi - lo).mean();
    for (Eigen::Index r = lo; r < hi; ++r) out(r) = j.upsilon(r) * mean;
  }
  return out;
}

PhiDerivativeCache make_phi_derivative_cache(EigenFactorization f, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("make_phi_derivative_cache: beta must be positive");
  PhiDerivativeCache c;
  const Eigen::Index n = f.d.size();
  Vector plus(n), root(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    plus(i) = phi_plus_scalar(f.d(i), beta);
    root(i) = std::sqrt(f.d(i) * f.d(i) + 4.0 * beta);
  }
  c.Gamma.resize(n, n);
  for (Eigen::Index jj = 0; jj < n; ++jj)
    for (Eigen::Index ii = 0; ii < n; ++ii)
      c.Gamma(ii, jj) = (plus(ii) + plus(jj)) / (root(ii) + root(jj));
  c.F = std::move(f);
  c.beta = beta;
  return c;
}

Matrix phi_plus_dderiv(const PhiDerivativeCache& c, const Matrix& b) {
  if (b.rows() != c.Gamma.rows() || b.cols() != c.Gamma.cols())
    throw std::invalid_argument("phi_plus_dderiv: shape mismatch");
  const Matrix& q = c.F.Q;
  const Matrix inner = c.Gamma.cwiseProduct(q.transpose() * b * q);
  Matrix out = q * inner * q.transpose();
  return 0.5 * (out + out.transpose());
}

FglJacobian::FglJacobian(std::size_t p, std::size_t num_classes)
    : p_(p),
      num_(num_classes),
      starts_(p * (p > 0 ? p - 1 : 0) / 2 * num_classes, 0),
      mask_(starts_.size(), 0),
      any_active_(p * (p > 0 ? p - 1 : 0) / 2, 0) {}

std::size_t FglJacobian::pair_index(std::size_t i, std::size_t j) const {
  if (i == j || i >= p_ || j >= p_) throw std::out_of_range("FglJacobian: bad entry pair");
  if (i > j) std::swap(i, j);
  return j * (j - 1) / 2 + i;
}

FusedProxJacobian FglJacobian::element(std::size_t i, std::size_t j) const {
  const std::size_t base = pair_index(i, j) * num_;
  FusedProxJacobian m;
  m.upsilon = Vector::Zero(static_cast<Eigen::Index>(num_));
  for (std::size_t l = 0; l < num_; ++l) {
    if (l == 0 || starts_[base + l]) m.block_start.push_back(static_cast<int>(l));
    m.upsilon(static_cast<Eigen::Index>(l)) = mask_[base + l];
  }
  return m;
}

void FglJacobian::set_element(std::size_t i, std::size_t j, const FusedProxJacobian& m) {
  if (m.length() != num_) throw std::invalid_argument("FglJacobian::set_element: length mismatch");
  const std::size_t k = pair_index(i, j);
  const std::size_t base = k * num_;
  std::fill(starts_.begin() + static_cast<std::ptrdiff_t>(base),
            starts_.begin() + static_cast<std::ptrdiff_t>(base + num_), 0);
  for (int s : m.block_start) starts_[base + static_cast<std::size_t>(s)] = 1;
  std::uint8_t any = 0;
  for (std::size_t l = 0; l < num_; ++l) {
    mask_[base + l] = m.upsilon(static_cast<Eigen::Index>(l)) != 0.0 ? 1 : 0;
    any |= mask_[base + l];
  }
  any_active_[k] = any;
}

std::size_t FglJacobian::active_pairs() const {
  std::size_t n = 0;
  for (auto a : any_active_) n += a;
  return n;
}

MatrixCollection FglJacobian::apply(const MatrixCollection& d) const {
  if (d.dim() != p_ || d.size() != num_) throw std::invalid_argument("FglJacobian::apply: shape mismatch");
  const auto p = static_cast<Eigen::Index>(p_);
  std::vector<Matrix> out(num_, Matrix::Zero(p, p));
  for (std::size_t l = 0; l < num_; ++l) out[l].diagonal() = d[l].diagonal();

  std::vector<double> fiber(num_), result(num_);
  std::size_t k = 0;
  for (Eigen::Index j = 1; j < p; ++j) {
    for (Eigen::Index i = 0; i < j; ++i, ++k) {
      if (!any_active_[k]) continue;
      const std::size_t base = k * num_;
      for (std::size_t l = 0; l < num_; ++l) fiber[l] = d[l](i, j);
      // Block means, written back through the mask.
      std::size_t lo = 0;
      while (lo < num_) {
        std::size_t hi = lo + 1;
        while (hi < num_ && !starts_[base + hi]) ++hi;
        double sum = 0.0;
        for (std::size_t r = lo; r < hi; ++r) sum += fiber[r];
        const double mean = sum / static_cast<double>(hi - lo);
        for (std::size_t r = lo; r < hi; ++r) result[r] = mask_[base + r] ? mean : 0.0;
        lo = hi;
      }
      for (std::size_t l = 0; l < num_; ++l) {
        out[l](i, j) = result[l];
        out[l](j, i) = result[l];
      }
    }
  }
  return MatrixCollection(std::move(out));
}

FglJacobian fgl_jacobian(const MatrixCollection& u, double sigma, double lambda1, double lambda2) {
  if (!(sigma > 0.0)) throw std::invalid_argument("fgl_jacobian: sigma must be positive");
  const std::size_t p = u.dim();
  FglJacobian table(p, u.size());
  for (std::size_t j = 1; j < p; ++j)
    for (std::size_t i = 0; i < j; ++i)
      table.set_element(i, j, fused_jacobian(fiber_view(u, i, j), sigma * lambda1, sigma * lambda2));
  return table;
}

NewtonOperator::NewtonOperator(FglJacobian fgl, std::vector<PhiDerivativeCache> phi, double sigma)
    : fgl_(std::move(fgl)), phi_(std::move(phi)), sigma_(sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("NewtonOperator: sigma must be positive");
  if (phi_.size() != fgl_.num_classes())
    throw std::invalid_argument("NewtonOperator: one derivative cache per class required");
}

MatrixCollection NewtonOperator::apply(const MatrixCollection& d) const {
  if (d.dim() != fgl_.dim() || d.size() != fgl_.num_classes())
    throw std::invalid_argument("newton_apply: shape mismatch");
  MatrixCollection w = fgl_.apply(d);
  std::vector<Matrix> out(d.size());
  for (std::size_t l = 0; l < d.size(); ++l) {
    out[l] = -sigma_ * (w[l] + phi_plus_dderiv(phi_[l], d[l])) - d[l] / sigma_;
  }
  applications_.fetch_add(1);
  congruences_.fetch_add(2 * d.size());
  return MatrixCollection(std::move(out));
}

MatrixCollection newton_apply(const NewtonOperator& n, const MatrixCollection& d) { return n.apply(d); }

}  // namespace fgl
