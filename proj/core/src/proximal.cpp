#include "fgl/proximal.hpp"

#include <cmath>
#include <stdexcept>

namespace fgl {
namespace {

void require_nonnegative(double lambda1, double lambda2, const char* what) {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0))
    throw std::invalid_argument(std::string(what) + ": penalties must be nonnegative");
}

void require_positive_beta(double beta, const char* what) {
  if (!(beta > 0.0)) throw std::invalid_argument(std::string(what) + ": beta must be positive");
}

}  // namespace

void ProblemData::validate() const {
  if (S.size() < 2) throw std::invalid_argument("ProblemData: need at least two classes");
  require_nonnegative(lambda1, lambda2, "ProblemData");
}

Vector soft_threshold(const Vector& v, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("soft_threshold: negative threshold");
  return v.unaryExpr([lambda](double a) {
    const double m = std::abs(a) - lambda;
    return m > 0.0 ? std::copysign(m, a) : 0.0;
  });
}

// Condat's direct algorithm for 1-D total-variation denoising. Each segment
// is written with a single value, so fused entries compare equal exactly.
EntryVector tv_chain_prox(const EntryVector& v, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("tv_chain_prox: negative weight");
  const Eigen::Index n = v.size();
  if (n <= 1 || lambda == 0.0) return v;

  EntryVector out(n);
  Eigen::Index k = 0, k0 = 0, kplus = 0, kminus = 0;
  const double two_lambda = 2.0 * lambda;
  double umin = lambda, umax = -lambda;
  double vmin = v(0) - lambda, vmax = v(0) + lambda;

  auto fill = [&](Eigen::Index upto, double value) {
    do {
      out(k0++) = value;
    } while (k0 <= upto);
  };

  for (;;) {
    while (k == n - 1) {
      if (umin < 0.0) {
        fill(kminus, vmin);
        k = kminus = k0;
        vmin = v(k0);
        umin = lambda;
        umax = vmin + umin - vmax;
      } else if (umax > 0.0) {
        fill(kplus, vmax);
        k = kplus = k0;
        vmax = v(k0);
        umax = -lambda;
        umin = vmax + umax - vmin;
      } else {
        vmin += umin / static_cast<double>(k - k0 + 1);
        fill(k, vmin);
        return out;
      }
    }
    umin += v(k + 1) - vmin;
    if (umin < -lambda) {
      fill(kminus, vmin);
      k = kplus = kminus = k0;
      vmin = v(k0);
      vmax = vmin + two_lambda;
      umin = lambda;
      umax = -lambda;
      continue;
    }
    umax += v(k + 1) - vmax;
    if (umax > lambda) {
      fill(kplus, vmax);
      k = kplus = kminus = k0;
      vmax = v(k0);
      vmin = vmax - two_lambda;
      umin = lambda;
      umax = -lambda;
      continue;
    }
    ++k;
    if (umin >= lambda) {
      kminus = k;
      vmin += (umin - lambda) / static_cast<double>(kminus - k0 + 1);
      umin = lambda;
    }
    if (umax <= -lambda) {
      kplus = k;
      vmax += (umax + lambda) / static_cast<double>(kplus - k0 + 1);
      umax = -lambda;
    }
  }
}

FusedProxResult prox_fused(const EntryVector& v, double lambda1, double lambda2) {
  require_nonnegative(lambda1, lambda2, "prox_fused");
  FusedProxResult r;
  r.x = tv_chain_prox(v, lambda2);
  const Eigen::Index n = v.size();
  r.z = Vector::Zero(n > 0 ? n - 1 : 0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    acc += v(i) - r.x(i);
    r.z(i) = acc;
  }
  r.prox = soft_threshold(r.x, lambda1);
  return r;
}

MatrixCollection prox_fgl(const MatrixCollection& x, double lambda1, double lambda2) {
  require_nonnegative(lambda1, lambda2, "prox_fgl");
  if (lambda1 == 0.0 && lambda2 == 0.0) return x;
  const auto p = static_cast<Eigen::Index>(x.dim());
  const std::size_t num = x.size();
  std::vector<Matrix> out = x.matrices();
  EntryVector fiber(static_cast<Eigen::Index>(num));
  for (Eigen::Index j = 1; j < p; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      for (std::size_t l = 0; l < num; ++l) fiber(static_cast<Eigen::Index>(l)) = x[l](i, j);
      const EntryVector y = soft_threshold(tv_chain_prox(fiber, lambda2), lambda1);
      for (std::size_t l = 0; l < num; ++l) {
        out[l](i, j) = y(static_cast<Eigen::Index>(l));
        out[l](j, i) = y(static_cast<Eigen::Index>(l));
      }
    }
  }
  return MatrixCollection(std::move(out));
}

double fgl_penalty(const MatrixCollection& theta, double lambda1, double lambda2) {
  const auto p = static_cast<Eigen::Index>(theta.dim());
  double sparse = 0.0, fused = 0.0;
  for (Eigen::Index j = 1; j < p; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      for (std::size_t l = 0; l < theta.size(); ++l) {
        sparse += std::abs(theta[l](i, j));
        if (l > 0) fused += std::abs(theta[l](i, j) - theta[l - 1](i, j));
      }
    }
  }
  return 2.0 * (lambda1 * sparse + lambda2 * fused);
}

double phi_plus_scalar(double x, double beta) {
  const double r = std::sqrt(x * x + 4.0 * beta);
  // Avoid cancellation for large negative x.
  return x >= 0.0 ? 0.5 * (r + x) : 2.0 * beta / (r - x);
}

double phi_minus_scalar(double x, double beta) { return phi_plus_scalar(-x, beta); }

Matrix phi_plus(const EigenFactorization& f, double beta) {
  require_positive_beta(beta, "phi_plus");
  return f.spectral_map([beta](double d) { return phi_plus_scalar(d, beta); });
}

Matrix phi_minus(const EigenFactorization& f, double beta) {
  require_positive_beta(beta, "phi_minus");
  return f.spectral_map([beta](double d) { return phi_minus_scalar(d, beta); });
}

double moreau_env_logdet(const EigenFactorization& f, double beta) {
  require_positive_beta(beta, "moreau_env_logdet");
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.d.size(); ++i) {
    const double m = phi_minus_scalar(f.d(i), beta);
    s += -beta * std::log(phi_plus_scalar(f.d(i), beta)) + 0.5 * m * m;
  }
  return s;
}

double moreau_env_fgl(const MatrixCollection& u, double sigma, double lambda1, double lambda2) {
  if (!(sigma > 0.0)) throw std::invalid_argument("moreau_env_fgl: sigma must be positive");
  const MatrixCollection pr = prox_fgl(u, sigma * lambda1, sigma * lambda2);
  return sigma * fgl_penalty(pr, lambda1, lambda2) + 0.5 * (pr - u).squared_norm();
}

bool is_positive_definite(const EigenFactorization& f) {
  if (f.d.size() == 0) return false;
  const double top = f.d(0);
  const double bottom = f.d(f.d.size() - 1);
  return bottom > 1e-12 * std::max(1.0, top);
}

double primal_objective(const MatrixCollection& theta, const ProblemData& data) {
  require_same_shape(theta, data.S, "primal_objective");
  double obj = 0.0;
  for (std::size_t l = 0; l < theta.size(); ++l) {
    const EigenFactorization f = sym_eig(theta[l]);
    if (!is_positive_definite(f)) return kInfeasible;
    obj += -f.d.array().log().sum() + theta[l].cwiseProduct(data.S[l]).sum();
  }
  return obj + fgl_penalty(theta, data.lambda1, data.lambda2);
}

}  // namespace fgl
