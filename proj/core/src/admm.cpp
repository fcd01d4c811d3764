#include "fgl/admm.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fgl {
namespace {

double inverse_residual(const MatrixCollection& a, const MatrixCollection& x) {
  const auto p = static_cast<Eigen::Index>(a.dim());
  const double denom = 1.0 + std::sqrt(static_cast<double>(p));
  double worst = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    const double r = (a[l] * x[l] - Matrix::Identity(p, p)).norm() / denom;
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace

void AdmmParams::validate() const {
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  if (!(tau > 0.0 && tau < golden)) throw std::invalid_argument("AdmmParams: tau must lie in (0, (1+sqrt 5)/2)");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("AdmmParams: sigma0 must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("AdmmParams: tol must be positive");
  if (max_iter < 0) throw std::invalid_argument("AdmmParams: max_iter must be nonnegative");
  if (sigma_every > 0 && !(sigma_ratio > 1.0 && sigma_scale > 1.0))
    throw std::invalid_argument("AdmmParams: sigma adaptation needs ratio and scale above 1");
}

KktResidual kkt_components_dual(const MatrixCollection& theta, const MatrixCollection& x,
                                const MatrixCollection& z, const ProblemData& data) {
  require_same_shape(theta, data.S, "kkt_residual_dual(theta)");
  require_same_shape(x, data.S, "kkt_residual_dual(x)");
  require_same_shape(z, data.S, "kkt_residual_dual(z)");
  KktResidual r;
  const double theta_scale = 1.0 + theta.norm();
  r.prox = (theta - prox_fgl(theta + z, data.lambda1, data.lambda2)).norm() / theta_scale;
  r.feasibility = (x - z - data.S).norm() / (1.0 + data.S.norm());
  r.inverse = inverse_residual(theta, x);
  return r;
}

double kkt_residual_dual(const MatrixCollection& theta, const MatrixCollection& x,
                         const MatrixCollection& z, const ProblemData& data) {
  return kkt_components_dual(theta, x, z, data).max();
}

SolverReport admm_solve(const ProblemData& data, const AdmmParams& params,
                        const std::optional<AdmmStart>& init) {
  data.validate();
  params.validate();
  const auto clock_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  };

  const std::size_t p = data.dim();
  const std::size_t num = data.num_classes();
  MatrixCollection theta, x, z;
  if (init) {
    theta = init->theta;
    x = init->x;
    z = init->z;
  } else {
    theta = MatrixCollection::identity(p, num);
    x = MatrixCollection::identity(p, num);
    z = x - data.S;
  }
  require_same_shape(theta, data.S, "admm_solve(theta)");
  require_same_shape(x, data.S, "admm_solve(x)");
  require_same_shape(z, data.S, "admm_solve(z)");

  SolverReport rep;
  rep.solver = "admm";
  double sigma = params.sigma0;
  KktResidual kkt = kkt_components_dual(theta, x, z, data);
  int iter = 0;
  auto record = [&](int k) {
    OuterRecord t;
    t.iteration = k;
    t.sigma = sigma;
    t.eta = kkt.max();
    t.objective = primal_objective(theta, data);
    t.seconds = elapsed();
    rep.trace.push_back(t);
  };

  while (kkt.max() > params.tol && iter < params.max_iter) {
    const double sigma_used = sigma;
    // X-update: prox of -log det / sigma.
    const MatrixCollection arg = z - theta / sigma + data.S;
    std::vector<Matrix> xs(num);
    for (std::size_t l = 0; l < num; ++l) xs[l] = phi_plus(sym_eig(arg[l]), 1.0 / sigma);
    x = MatrixCollection(std::move(xs));

    // Z-update by the Moreau decomposition: P is positively homogeneous, so
    // Prox_{P*/sigma}(V) = V - Prox_P(V) with the unscaled penalties.
    const MatrixCollection v = x + theta / sigma - data.S;
    z = v - prox_fgl(v, data.lambda1, data.lambda2);

    const MatrixCollection theta_prev = theta;
    theta.axpy(params.tau * sigma, x - z - data.S);
    ++iter;

    kkt = kkt_components_dual(theta, x, z, data);
    if (params.observer) params.observer(AdmmIterate{iter, sigma_used, theta_prev, theta, x, z});

    if (params.sigma_every > 0 && iter % params.sigma_every == 0) {
      const double primal = kkt.feasibility;
      const double dual = std::max(kkt.prox, kkt.inverse);
      if (primal > params.sigma_ratio * dual)
        sigma *= params.sigma_scale;
      else if (dual > params.sigma_ratio * primal)
        sigma /= params.sigma_scale;
    }
    if (params.trace_every > 0 && iter % params.trace_every == 0) record(iter);
  }
  if (rep.trace.empty() || rep.trace.back().iteration != iter) record(iter);

  rep.Theta = theta;
  rep.Omega = theta;
  rep.X = x;
  rep.Z = z;
  rep.kkt = kkt;
  rep.eta = kkt.max();
  rep.converged = rep.eta <= params.tol;
  rep.outer_iterations = iter;
  rep.objective = rep.trace.back().objective;
  rep.seconds = elapsed();
  return rep;
}

}  // namespace fgl
