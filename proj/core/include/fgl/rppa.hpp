#pragma once

#include <functional>
#include <optional>

#include "fgl/admm.hpp"
#include "fgl/proximal.hpp"
#include "fgl/report.hpp"
#include "fgl/ssn.hpp"

namespace fgl {

/// Summable tolerance sequence k -> eps_k.
using ToleranceSequence = std::function<double(int)>;

/// c * r^k.
ToleranceSequence geometric_sequence(double c, double r);

struct RppaParams {
  double tol = 1e-6;
  double sigma0 = 1.0;
  double sigma_growth = 1.6;
  double sigma_max = 1e6;
  ToleranceSequence eps_seq = geometric_sequence(0.5, 0.7);
  ToleranceSequence delta_seq = geometric_sequence(0.5, 0.7);
  int max_outer = 100;
  int warm_start_iters = 200;
  double warm_start_factor = 100.0;
  // Inner targets never drop below grad_floor * tol * (1 + ||Theta^k||);
  // below that the inner gradient is roundoff.
  double grad_floor = 0.1;
  SsnParams ssn;
  AdmmParams warm_admm;  // tol and max_iter are overridden by the warm start

  void validate() const;
};

struct PrimalStart {
  MatrixCollection theta;
  MatrixCollection omega;
  MatrixCollection x;
};

/// eta_P components: prox fixed point, ||Theta - Omega||, and ||Omega X - I||.
KktResidual kkt_components_primal(const MatrixCollection& theta, const MatrixCollection& omega,
                                  const MatrixCollection& x, const ProblemData& data);
double kkt_residual_primal(const MatrixCollection& theta, const MatrixCollection& omega,
                           const MatrixCollection& x, const ProblemData& data);

struct WarmStart {
  PrimalStart start;
  int iterations = 0;
  double eta = 0.0;
};

/// ADMM from identity collections for at most iters iterations, stopping at
/// eta_A <= tol_factor * tol. Theta and Omega take the ADMM Theta, X its X.
WarmStart warm_start(const ProblemData& data, int iters, double tol, double tol_factor = 100.0,
                     const AdmmParams& admm = {});

/// Regularized proximal point algorithm with semismooth Newton subproblem
/// solves. Without init, runs the ADMM warm start (or starts from identity
/// collections if warm_start_iters == 0).
SolverReport rppa_solve(const ProblemData& data, const RppaParams& params,
                        const std::optional<PrimalStart>& init = std::nullopt);

}  // namespace fgl
