#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "fgl/linalg.hpp"

namespace fgl {

/// One element of the surrogate generalized Jacobian of the fused Lasso prox.
///
/// Represents M = Diag(upsilon) * Q where Q averages within each block of a
/// partition of {0..L-1} into consecutive runs. The runs are the fused groups
/// of the chain TV prox (K = supp(B x)), upsilon is the soft-threshold mask.
struct FusedProxJacobian {
  std::vector<int> block_start;  // first index of each block, ascending, starts with 0
  Vector upsilon;                // 0/1, length L

  std::size_t length() const { return static_cast<std::size_t>(upsilon.size()); }
  std::size_t num_blocks() const { return block_start.size(); }
  Matrix dense() const;
};

/// Element of the surrogate Jacobian of Prox_phi at v, phi = l1 ||.||_1 + l2 ||B.||_1.
/// Ties |x_i| == lambda1 take upsilon_i = 0.
FusedProxJacobian fused_jacobian(const EntryVector& v, double lambda1, double lambda2);

/// upsilon (.) blockmean(w), O(L).
EntryVector fused_jacobian_apply(const FusedProxJacobian& j, const EntryVector& w);

/// Eigen-data needed for the derivative of phi+_beta at W.
struct PhiDerivativeCache {
  EigenFactorization F;
  Matrix Gamma;
  double beta = 0.0;
};

PhiDerivativeCache make_phi_derivative_cache(EigenFactorization f, double beta);

/// (phi+_beta)'(W)[B] = Q (Gamma o (Q^T B Q)) Q^T.
Matrix phi_plus_dderiv(const PhiDerivativeCache& c, const Matrix& b);

/// Surrogate Jacobian of Prox_{sigma P} at U for the whole collection.
///
/// Only pairs i < j are stored; the diagonal acts as the identity and j > i
/// mirrors i < j. Storage is flat: per pair, L start flags and L mask bits.
class FglJacobian {
 public:
  FglJacobian() = default;
  FglJacobian(std::size_t p, std::size_t num_classes);

  std::size_t dim() const { return p_; }
  std::size_t num_classes() const { return num_; }

  /// Element for entry pair (i, j), i != j.
  FusedProxJacobian element(std::size_t i, std::size_t j) const;
  void set_element(std::size_t i, std::size_t j, const FusedProxJacobian& m);

  /// Number of pairs whose element is not identically zero.
  std::size_t active_pairs() const;

  MatrixCollection apply(const MatrixCollection& d) const;

 private:
  std::size_t pair_index(std::size_t i, std::size_t j) const;

  std::size_t p_ = 0;
  std::size_t num_ = 0;
  std::vector<std::uint8_t> starts_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::uint8_t> any_active_;
};

FglJacobian fgl_jacobian(const MatrixCollection& u, double sigma, double lambda1, double lambda2);

/// The self-adjoint negative definite map D -> (V - I/sigma)[D] with
/// V[D] = -sigma W[D] - sigma (phi+_sigma)'(W^(l))[D^(l)].
class NewtonOperator {
 public:
  NewtonOperator(FglJacobian fgl, std::vector<PhiDerivativeCache> phi, double sigma);

  MatrixCollection apply(const MatrixCollection& d) const;

  double sigma() const { return sigma_; }
  const FglJacobian& fgl() const { return fgl_; }
  const std::vector<PhiDerivativeCache>& phi() const { return phi_; }

  // Operation counters accumulated over all apply() calls.
  std::uint64_t applications() const { return applications_.load(); }
  std::uint64_t congruences() const { return congruences_.load(); }

 private:
  FglJacobian fgl_;
  std::vector<PhiDerivativeCache> phi_;
  double sigma_;
  mutable std::atomic<std::uint64_t> applications_{0};
  mutable std::atomic<std::uint64_t> congruences_{0};
};

MatrixCollection newton_apply(const NewtonOperator& n, const MatrixCollection& d);

}  // namespace fgl
