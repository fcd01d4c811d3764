#pragma once

#include <functional>
#include <optional>

#include "fgl/proximal.hpp"
#include "fgl/report.hpp"

namespace fgl {

/// State after one full ADMM sweep, handed to AdmmParams::observer.
struct AdmmIterate {
  int iteration = 0;
  double sigma = 0.0;  // sigma used in this sweep
  const MatrixCollection& theta_prev;
  const MatrixCollection& theta;
  const MatrixCollection& x;
  const MatrixCollection& z;
};

struct AdmmParams {
  double tau = 1.618;
  double sigma0 = 1.0;
  double tol = 1e-6;
  int max_iter = 20000;
  // sigma is scaled by sigma_scale when one feasibility measure exceeds the
  // other by sigma_ratio, checked every sigma_every iterations (0 disables).
  double sigma_ratio = 5.0;
  double sigma_scale = 1.5;
  int sigma_every = 20;
  int trace_every = 10;
  std::function<void(const AdmmIterate&)> observer;

  void validate() const;
};

struct AdmmStart {
  MatrixCollection theta;
  MatrixCollection x;
  MatrixCollection z;
};

/// eta_A = max of the prox fixed-point, linear-constraint and inverse terms.
KktResidual kkt_components_dual(const MatrixCollection& theta, const MatrixCollection& x,
                                const MatrixCollection& z, const ProblemData& data);
double kkt_residual_dual(const MatrixCollection& theta, const MatrixCollection& x,
                         const MatrixCollection& z, const ProblemData& data);

/// ADMM on the dual problem min -log det X + P*(Z) s.t. X - Z = S.
/// Without a start point: Theta = X = I and Z = X - S.
SolverReport admm_solve(const ProblemData& data, const AdmmParams& params,
                        const std::optional<AdmmStart>& init = std::nullopt);

}  // namespace fgl
