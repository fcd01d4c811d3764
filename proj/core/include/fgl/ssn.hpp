#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgl/jacobian.hpp"
#include "fgl/linalg.hpp"
#include "fgl/proximal.hpp"

namespace fgl {

/// Raised when a solver cannot make progress; what() carries diagnostics.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Semismooth Newton settings. Ranges: mu in (0, 1/2), eta_bar in (0, 1),
/// tau in (0, 1], rho in (0, 1).
struct SsnParams {
  double mu = 1e-4;
  double eta_bar = 1e-2;
  double tau = 0.5;
  double rho = 0.5;
  int max_newton = 50;
  int max_cg = 500;
  int max_backtracks = 60;

  void validate() const;
};

/// Anchors of the k-th proximal point subproblem.
struct SubproblemContext {
  SubproblemContext(MatrixCollection theta, MatrixCollection omega, MatrixCollection x,
                    double sigma, const ProblemData& data);

  MatrixCollection theta_k;
  MatrixCollection omega_k;
  MatrixCollection x_k;
  double sigma;
  const ProblemData& data;
};

/// Value and gradient of the regularized dual function at X, together with
/// everything the Newton operator and the outer update reuse.
struct PhiHatEvaluation {
  double value = 0.0;
  double value_scale = 0.0;  // magnitude of the summed terms, for roundoff slack
  MatrixCollection grad;
  double grad_norm = 0.0;
  MatrixCollection u;       // U_k(X) = Theta^k + sigma (X - S)
  MatrixCollection prox_u;  // Prox_{sigma P}(U_k(X)), the candidate Theta^{k+1}
  MatrixCollection phi_w;   // phi+_sigma(W_k(X)), the candidate Omega^{k+1}
  std::vector<EigenFactorization> w_eigs;
};

PhiHatEvaluation evaluate_phi_hat(const SubproblemContext& ctx, const MatrixCollection& x);

double eval_phi_hat(const SubproblemContext& ctx, const MatrixCollection& x);

/// Same value as eval_phi_hat, assembled from the two Moreau envelopes and
/// the quadratic terms. Loses accuracy for large sigma; kept as a reference.
double eval_phi_hat_from_envelopes(const SubproblemContext& ctx, const MatrixCollection& x);

/// Gradient of the plain (unregularized) dual function: -Prox + phi+.
MatrixCollection grad_phi(const SubproblemContext& ctx, const MatrixCollection& x);

PhiHatEvaluation grad_phi_hat(const SubproblemContext& ctx, const MatrixCollection& x);

/// Builds (V - I/sigma) at the point of a previous evaluation.
NewtonOperator make_newton_operator(const SubproblemContext& ctx, const PhiHatEvaluation& e);

enum class CgStatus { converged, max_iterations, breakdown };

struct CgResult {
  MatrixCollection solution;
  int iterations = 0;
  double residual = 0.0;
  CgStatus status = CgStatus::converged;
};

/// Solves N[D] = rhs for the negative definite N by running CG on -N.
CgResult cg_solve(const NewtonOperator& n, const MatrixCollection& rhs, double tol, int max_iter);

/// Generic CG entry point for any negative definite self-adjoint map.
CgResult cg_solve(const std::function<MatrixCollection(const MatrixCollection&)>& apply_n,
                  const MatrixCollection& rhs, double tol, int max_iter);

struct NewtonStep {
  double grad_norm = 0.0;  // at X^j
  double phi_hat = 0.0;    // at X^j
  double slope = 0.0;      // <grad, D^j>
  int cg_iterations = 0;
  double cg_residual = 0.0;
  double step = 0.0;       // alpha_j, 0 for the final record
};

struct SsnResult {
  MatrixCollection x;
  PhiHatEvaluation eval;  // at x
  std::vector<NewtonStep> trace;
  int newton_iterations = 0;
  int cg_iterations = 0;
  bool converged = false;
};

/// Returns true once the outer stopping rule accepts the evaluation.
using SsnStopRule = std::function<bool(const PhiHatEvaluation&)>;

/// Inexact semismooth Newton with CG directions and Armijo backtracking.
/// Throws SolverError when the line search exhausts its backtracks.
SsnResult ssn_solve(const SubproblemContext& ctx, const MatrixCollection& x0,
                    const SsnParams& params, const SsnStopRule& stop);

}  // namespace fgl
