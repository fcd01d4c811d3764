#include "fgl/rppa.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fgl {

ToleranceSequence geometric_sequence(double c, double r) {
  if (!(c >= 0.0) || !(r >= 0.0 && r < 1.0))
    throw std::invalid_argument("geometric_sequence: need c >= 0 and 0 <= r < 1");
  return [c, r](int k) { return c * std::pow(r, k); };
}

void RppaParams::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("RppaParams: tol must be positive");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("RppaParams: sigma0 must be positive");
  if (!(sigma_growth >= 1.0)) throw std::invalid_argument("RppaParams: sigma_growth must be >= 1");
  if (!(sigma_max >= sigma0)) throw std::invalid_argument("RppaParams: sigma_max below sigma0");
  if (!eps_seq || !delta_seq) throw std::invalid_argument("RppaParams: tolerance sequences required");
  if (max_outer < 0 || warm_start_iters < 0) throw std::invalid_argument("RppaParams: negative iteration cap");
  if (!(grad_floor >= 0.0)) throw std::invalid_argument("RppaParams: grad_floor must be nonnegative");
  ssn.validate();
}

KktResidual kkt_components_primal(const MatrixCollection& theta, const MatrixCollection& omega,
                                  const MatrixCollection& x, const ProblemData& data) {
  require_same_shape(theta, data.S, "kkt_residual_primal(theta)");
  require_same_shape(omega, data.S, "kkt_residual_primal(omega)");
  require_same_shape(x, data.S, "kkt_residual_primal(x)");
  KktResidual r;
  const double theta_scale = 1.0 + theta.norm();
  r.prox = (theta - prox_fgl(theta + x - data.S, data.lambda1, data.lambda2)).norm() / theta_scale;
  r.feasibility = (theta - omega).norm() / theta_scale;
  const auto p = static_cast<Eigen::Index>(data.dim());
  const double denom = 1.0 + std::sqrt(static_cast<double>(p));
  for (std::size_t l = 0; l < theta.size(); ++l)
    r.inverse = std::max(r.inverse, (omega[l] * x[l] - Matrix::Identity(p, p)).norm() / denom);
  return r;
}

double kkt_residual_primal(const MatrixCollection& theta, const MatrixCollection& omega,
                           const MatrixCollection& x, const ProblemData& data) {
  return kkt_components_primal(theta, omega, x, data).max();
}

WarmStart warm_start(const ProblemData& data, int iters, double tol, double tol_factor,
                     const AdmmParams& admm) {
  WarmStart ws;
  const std::size_t p = data.dim();
  const std::size_t num = data.num_classes();
  if (iters <= 0) {
    const MatrixCollection eye = MatrixCollection::identity(p, num);
    ws.start = PrimalStart{eye, eye, eye};
    ws.eta = kkt_residual_primal(eye, eye, eye, data);
    return ws;
  }
  AdmmParams params = admm;
  params.tol = tol_factor * tol;
  params.max_iter = iters;
  params.observer = nullptr;
  const SolverReport r = admm_solve(data, params);
  ws.start = PrimalStart{r.Theta, r.Theta, r.X};
  ws.iterations = r.outer_iterations;
  ws.eta = r.eta;
  return ws;
}

SolverReport rppa_solve(const ProblemData& data, const RppaParams& params,
                        const std::optional<PrimalStart>& init) {
  data.validate();
  params.validate();
  const auto clock_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  };

  SolverReport rep;
  rep.solver = "rppa";
  PrimalStart cur;
  if (init) {
    cur = *init;
  } else {
    WarmStart ws = warm_start(data, params.warm_start_iters, params.tol, params.warm_start_factor,
                              params.warm_admm);
    cur = std::move(ws.start);
    rep.warm_start_iterations = ws.iterations;
  }
  require_same_shape(cur.theta, data.S, "rppa_solve(theta)");
  require_same_shape(cur.omega, data.S, "rppa_solve(omega)");
  require_same_shape(cur.x, data.S, "rppa_solve(x)");

  double sigma = params.sigma0;
  KktResidual kkt = kkt_components_primal(cur.theta, cur.omega, cur.x, data);
  {
    OuterRecord t;
    t.sigma = sigma;
    t.eta = kkt.max();
    t.objective = primal_objective(cur.theta, data);
    t.seconds = elapsed();
    rep.trace.push_back(t);
  }

  int k = 0;
  for (; kkt.max() > params.tol && k < params.max_outer; ++k) {
    const SubproblemContext ctx(cur.theta, cur.omega, cur.x, sigma, data);
    const double eps_k = params.eps_seq(k);
    const double delta_k = params.delta_seq(k);
    const double floor = params.grad_floor * params.tol * (1.0 + cur.theta.norm());
    // Criteria (A) and (B); (B) is evaluated on the update the current
    // inner iterate would produce.
    auto stop = [&](const PhiHatEvaluation& e) {
      const double move = std::sqrt((e.prox_u - cur.theta).squared_norm() + (e.phi_w - cur.omega).squared_norm());
      const double target = std::min(eps_k / sigma, delta_k / sigma * move);
      return e.grad_norm <= std::max(target, floor);
    };

    SsnResult inner;
    try {
      inner = ssn_solve(ctx, cur.x, params.ssn, stop);
    } catch (const SolverError& err) {
      throw SolverError("rppa_solve: outer iteration " + std::to_string(k) + ": " + err.what());
    }

    cur.theta = inner.eval.prox_u;
    cur.omega = inner.eval.phi_w;
    cur.x = inner.x;
    kkt = kkt_components_primal(cur.theta, cur.omega, cur.x, data);

    rep.total_newton += inner.newton_iterations;
    rep.total_cg += inner.cg_iterations;
    rep.max_newton_per_outer = std::max(rep.max_newton_per_outer, inner.newton_iterations);

    OuterRecord t;
    t.iteration = k + 1;
    t.sigma = sigma;
    t.eta = kkt.max();
    t.inner_iterations = inner.newton_iterations;
    t.cg_iterations = inner.cg_iterations;
    t.objective = primal_objective(cur.theta, data);
    t.seconds = elapsed();
    rep.trace.push_back(t);

    sigma = std::min(sigma * params.sigma_growth, params.sigma_max);
  }

  rep.Theta = std::move(cur.theta);
  rep.Omega = std::move(cur.omega);
  rep.X = std::move(cur.x);
  rep.kkt = kkt;
  rep.eta = kkt.max();
  rep.converged = rep.eta <= params.tol;
  rep.outer_iterations = k;
  rep.objective = rep.trace.back().objective;
  rep.seconds = elapsed();
  return rep;
}

}  // namespace fgl
