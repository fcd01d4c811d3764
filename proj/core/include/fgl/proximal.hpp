#pragma once

#include <limits>

#include "fgl/linalg.hpp"

namespace fgl {

/// Sample covariances and penalty weights of one fused graphical Lasso problem.
struct ProblemData {
  MatrixCollection S;
  double lambda1 = 0.0;  // sparsity weight
  double lambda2 = 0.0;  // similarity weight

  std::size_t dim() const { return S.dim(); }
  std::size_t num_classes() const { return S.size(); }

  /// Throws std::invalid_argument for negative weights or fewer than two classes.
  void validate() const;
};

/// Result of the fused Lasso prox on one fiber.
///
/// x is the chain total-variation prox of v with weight lambda2, z the dual
/// vector with x = v - B^T z, and prox the soft-thresholded x.
struct FusedProxResult {
  EntryVector x;
  Vector z;
  EntryVector prox;
};

/// Entrywise sign(v) * max(|v| - lambda, 0). Throws on lambda < 0.
Vector soft_threshold(const Vector& v, double lambda);

/// Exact minimizer of lambda * sum |x_i - x_{i+1}| + 0.5 ||x - v||^2.
///
/// Direct (taut-string) solver; runs of equal values in the result are
/// bitwise identical, so block structure can be read off with ==.
EntryVector tv_chain_prox(const EntryVector& v, double lambda);

/// Prox of lambda1 ||x||_1 + lambda2 ||Bx||_1 at v.
FusedProxResult prox_fused(const EntryVector& v, double lambda1, double lambda2);

/// Applies prox_fused to every off-diagonal fiber (i < j, mirrored); the
/// diagonal passes through unchanged.
MatrixCollection prox_fgl(const MatrixCollection& x, double lambda1, double lambda2);

/// The FGL regularizer: sums over i != j, so every i < j pair counts twice.
double fgl_penalty(const MatrixCollection& theta, double lambda1, double lambda2);

// Scalar maps phi+_beta(x) = (sqrt(x^2 + 4 beta) + x) / 2 and its complement.
double phi_plus_scalar(double x, double beta);
double phi_minus_scalar(double x, double beta);

/// phi+_beta(A) = Q Diag(phi+_beta(d)) Q^T, the prox of -beta log det at A.
Matrix phi_plus(const EigenFactorization& f, double beta);
Matrix phi_minus(const EigenFactorization& f, double beta);

/// min over X > 0 of -beta log det X + 0.5 ||X - A||^2, from eigenvalues only.
double moreau_env_logdet(const EigenFactorization& f, double beta);

/// sigma * P(Prox) + 0.5 ||Prox - U||^2 where Prox = Prox_{sigma P}(U).
double moreau_env_fgl(const MatrixCollection& u, double sigma, double lambda1, double lambda2);

/// Smallest-eigenvalue test used wherever positive definiteness is required.
bool is_positive_definite(const EigenFactorization& f);

/// -log det Theta + <S, Theta> summed over classes, plus the regularizer.
/// Returns +infinity when some Theta^(l) is not positive definite.
double primal_objective(const MatrixCollection& theta, const ProblemData& data);

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

}  // namespace fgl
