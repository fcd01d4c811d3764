#include "fgl/ssn.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fgl {

void SsnParams::validate() const {
  if (!(mu > 0.0 && mu < 0.5)) throw std::invalid_argument("SsnParams: mu must lie in (0, 1/2)");
  if (!(eta_bar > 0.0 && eta_bar < 1.0)) throw std::invalid_argument("SsnParams: eta_bar must lie in (0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("SsnParams: tau must lie in (0, 1]");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("SsnParams: rho must lie in (0, 1)");
  if (max_newton < 0 || max_cg < 1 || max_backtracks < 1)
    throw std::invalid_argument("SsnParams: iteration caps must be positive");
}

SubproblemContext::SubproblemContext(MatrixCollection theta, MatrixCollection omega,
                                     MatrixCollection x, double sigma_k, const ProblemData& problem)
    : theta_k(std::move(theta)), omega_k(std::move(omega)), x_k(std::move(x)), sigma(sigma_k), data(problem) {
  if (!(sigma > 0.0)) throw std::invalid_argument("SubproblemContext: sigma must be positive");
  require_same_shape(theta_k, data.S, "SubproblemContext(theta)");
  require_same_shape(omega_k, data.S, "SubproblemContext(omega)");
  require_same_shape(x_k, data.S, "SubproblemContext(x)");
}

// The value is computed as the Lagrangian infimum evaluated at its
// minimizers (Theta' = Prox, Omega' = phi+). Every term stays O(1) as sigma
// grows, unlike the envelope form whose O(sigma) pieces cancel.
PhiHatEvaluation evaluate_phi_hat(const SubproblemContext& ctx, const MatrixCollection& x) {
  require_same_shape(x, ctx.data.S, "evaluate_phi_hat");
  const double sigma = ctx.sigma;
  const ProblemData& data = ctx.data;
  const std::size_t num = x.size();

  PhiHatEvaluation e;
  e.u = ctx.theta_k + sigma * (x - data.S);
  e.prox_u = prox_fgl(e.u, sigma * data.lambda1, sigma * data.lambda2);

  std::vector<Matrix> phi(num);
  e.w_eigs.reserve(num);
  double logdet_part = 0.0, logdet_scale = 0.0;
  for (std::size_t l = 0; l < num; ++l) {
    e.w_eigs.push_back(sym_eig(ctx.omega_k[l] - sigma * x[l]));
    const EigenFactorization& f = e.w_eigs.back();
    phi[l] = phi_plus(f, sigma);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < f.d.size(); ++i) logdet += std::log(phi_plus_scalar(f.d(i), sigma));
    const double lin = phi[l].cwiseProduct(x[l]).sum();
    const double prox_term = (phi[l] - ctx.omega_k[l]).squaredNorm() / (2.0 * sigma);
    logdet_part += -logdet + lin + prox_term;
    logdet_scale += std::abs(logdet) + std::abs(lin) + prox_term;
  }
  e.phi_w = MatrixCollection(std::move(phi));

  const double pen = fgl_penalty(e.prox_u, data.lambda1, data.lambda2);
  const double lin = collection_inner(e.prox_u, data.S - x);
  const double prox_term = (e.prox_u - ctx.theta_k).squared_norm() / (2.0 * sigma);
  const double reg = (x - ctx.x_k).squared_norm() / (2.0 * sigma);
  e.value = pen + lin + prox_term + logdet_part - reg;
  e.value_scale = pen + std::abs(lin) + prox_term + logdet_scale + reg;

  e.grad = e.phi_w - e.prox_u;
  e.grad.axpy(-1.0 / sigma, x - ctx.x_k);
  e.grad_norm = e.grad.norm();
  return e;
}

double eval_phi_hat(const SubproblemContext& ctx, const MatrixCollection& x) {
  return evaluate_phi_hat(ctx, x).value;
}

double eval_phi_hat_from_envelopes(const SubproblemContext& ctx, const MatrixCollection& x) {
  const double sigma = ctx.sigma;
  const ProblemData& data = ctx.data;
  const MatrixCollection u = ctx.theta_k + sigma * (x - data.S);
  double v = moreau_env_fgl(u, sigma, data.lambda1, data.lambda2) / sigma;
  v += -u.squared_norm() / (2.0 * sigma) + ctx.theta_k.squared_norm() / (2.0 * sigma);
  for (std::size_t l = 0; l < x.size(); ++l) {
    const Matrix w = ctx.omega_k[l] - sigma * x[l];
    v += moreau_env_logdet(sym_eig(w), sigma) / sigma;
    v -= w.squaredNorm() / (2.0 * sigma) - ctx.omega_k[l].squaredNorm() / (2.0 * sigma);
  }
  return v - (x - ctx.x_k).squared_norm() / (2.0 * sigma);
}

MatrixCollection grad_phi(const SubproblemContext& ctx, const MatrixCollection& x) {
  const PhiHatEvaluation e = evaluate_phi_hat(ctx, x);
  return e.phi_w - e.prox_u;
}

PhiHatEvaluation grad_phi_hat(const SubproblemContext& ctx, const MatrixCollection& x) {
  return evaluate_phi_hat(ctx, x);
}

NewtonOperator make_newton_operator(const SubproblemContext& ctx, const PhiHatEvaluation& e) {
  std::vector<PhiDerivativeCache> caches;
  caches.reserve(e.w_eigs.size());
  for (const auto& f : e.w_eigs) caches.push_back(make_phi_derivative_cache(f, ctx.sigma));
  return NewtonOperator(fgl_jacobian(e.u, ctx.sigma, ctx.data.lambda1, ctx.data.lambda2),
                        std::move(caches), ctx.sigma);
}

CgResult cg_solve(const std::function<MatrixCollection(const MatrixCollection&)>& apply_n,
                  const MatrixCollection& rhs, double tol, int max_iter) {
  // CG on A = -N, b = -rhs; the recursive residual equals N[D] - rhs up to sign.
  CgResult res;
  res.solution = MatrixCollection::zeros(rhs.dim(), rhs.size());
  MatrixCollection r = -rhs;
  MatrixCollection dir = r;
  double rr = r.squared_norm();
  res.residual = std::sqrt(rr);
  if (res.residual <= tol) return res;

  for (int it = 0; it < max_iter; ++it) {
    const MatrixCollection a_dir = -apply_n(dir);
    const double curvature = collection_inner(dir, a_dir);
    if (!(curvature > 0.0)) {
      res.status = CgStatus::breakdown;
      return res;
    }
    const double alpha = rr / curvature;
    res.solution.axpy(alpha, dir);
    r.axpy(-alpha, a_dir);
    const double rr_next = r.squared_norm();
    res.iterations = it + 1;
    res.residual = std::sqrt(rr_next);
    if (res.residual <= tol) return res;
    dir *= rr_next / rr;
    dir += r;
    rr = rr_next;
  }
  res.status = CgStatus::max_iterations;
  return res;
}

CgResult cg_solve(const NewtonOperator& n, const MatrixCollection& rhs, double tol, int max_iter) {
  return cg_solve([&n](const MatrixCollection& d) { return n.apply(d); }, rhs, tol, max_iter);
}

SsnResult ssn_solve(const SubproblemContext& ctx, const MatrixCollection& x0,
                    const SsnParams& params, const SsnStopRule& stop) {
  params.validate();
  SsnResult out;
  out.x = x0;
  out.eval = evaluate_phi_hat(ctx, out.x);

  for (int j = 0;; ++j) {
    NewtonStep rec;
    rec.grad_norm = out.eval.grad_norm;
    rec.phi_hat = out.eval.value;
    if (stop(out.eval)) {
      out.converged = true;
      out.trace.push_back(rec);
      return out;
    }
    if (j >= params.max_newton) {
      out.trace.push_back(rec);
      return out;
    }

    const NewtonOperator newton = make_newton_operator(ctx, out.eval);
    const double cg_tol = std::min(params.eta_bar, std::pow(out.eval.grad_norm, 1.0 + params.tau));
    CgResult cg = cg_solve(newton, -out.eval.grad, cg_tol, params.max_cg);
    rec.cg_iterations = cg.iterations;
    rec.cg_residual = cg.residual;
    out.cg_iterations += cg.iterations;

    MatrixCollection dir = std::move(cg.solution);
    double slope = collection_inner(out.eval.grad, dir);
    if (!(slope > 0.0)) {
      // CG broke down before producing an ascent direction; fall back to the gradient.
      dir = out.eval.grad;
      slope = out.eval.grad_norm * out.eval.grad_norm;
    }
    rec.slope = slope;

    // Armijo backtracking. The slack absorbs roundoff in the value once
    // the predicted increase drops to machine precision.
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * out.eval.value_scale;
    double alpha = 1.0;
    bool accepted = false;
    for (int m = 0; m < params.max_backtracks; ++m, alpha *= params.rho) {
      MatrixCollection trial_x = out.x;
      trial_x.axpy(alpha, dir);
      PhiHatEvaluation trial = evaluate_phi_hat(ctx, trial_x);
      if (trial.value >= out.eval.value + params.mu * alpha * slope - slack) {
        out.x = std::move(trial_x);
        out.eval = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "ssn_solve: line search failed after " << params.max_backtracks
          << " backtracks (newton iteration " << j << ", |grad| = " << rec.grad_norm
          << ", slope = " << slope << ", sigma = " << ctx.sigma << ")";
      throw SolverError(msg.str());
    }
    rec.step = alpha;
    out.trace.push_back(rec);
    ++out.newton_iterations;
  }
}

}  // namespace fgl
