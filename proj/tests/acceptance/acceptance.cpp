// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fgl/admm.hpp"
#include "fgl/data.hpp"
#include "fgl/jacobian.hpp"
#include "fgl/proximal.hpp"
#include "fgl/rppa.hpp"
#include "fgl/ssn.hpp"
#include "oracles.hpp"

using namespace fgl;
namespace ft = fgl::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* spec, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* spec, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, spec);
  std::vsnprintf(buf, sizeof buf, spec, ap);
  va_end(ap);
  return buf;
}

Vector random_vector(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

// 1. Fused prox against the dual projected-gradient oracle.
Outcome prox_oracle_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> len(2, 12);
  std::uniform_real_distribution<double> lam(0.0, 2.0);
  double worst = 0.0;
  int fibers = 0;
  for (; fibers < 10000; ++fibers) {
    const int n = len(rng);
    const Vector v = random_vector(rng, n, 2.0);
    const double l1 = lam(rng), l2 = lam(rng);
    const double ours = ft::fused_objective(prox_fused(v, l1, l2).prox, v, l1, l2);
    const auto oracle = ft::fused_prox_oracle(v, l1, l2);
    worst = std::max(worst, std::abs(ours - oracle.primal));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && secs < 60.0,
          fmt("%d fibers, max |objective gap| = %.2e (<= 1e-10), %.1f s (< 60 s)", fibers, worst, secs)};
}

// 2. phi+ identities and stationarity.
Outcome phi_identities() {
  std::mt19937_64 rng(102);
  std::uniform_int_distribution<int> dim(1, 50);
  std::uniform_real_distribution<double> beta_d(1e-3, 10.0);
  double worst_diff = 0, worst_prod = 0, worst_stat = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int p = dim(rng);
    const Matrix a = ft::random_symmetric(rng, p, 3.0);
    const double beta = beta_d(rng);
    const auto f = sym_eig(a);
    const Matrix xp = phi_plus(f, beta), xm = phi_minus(f, beta);
    const Matrix eye = Matrix::Identity(p, p);
    worst_diff = std::max(worst_diff, (xp - xm - a).norm() / std::max(1.0, a.norm()));
    worst_prod = std::max(worst_prod, (xp * xm - beta * eye).norm() / (beta * std::sqrt(double(p))));
    // Stationarity via a linear solve rather than the spectral route.
    const Matrix inv = xp.ldlt().solve(eye);
    worst_stat = std::max(worst_stat, (-beta * inv + xp - a).norm() / std::max(1.0, a.norm()));
  }
  const bool ok = worst_diff <= 1e-8 && worst_prod <= 1e-8 && worst_stat <= 1e-8;
  return {ok, fmt("100 matrices, rel err: diff %.1e, product %.1e, stationarity %.1e (<= 1e-8)", worst_diff,
                  worst_prod, worst_stat)};
}

// 3. Jacobian element against the explicit pseudo-inverse formula.
Outcome jacobian_oracle() {
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<int> len(2, 6);
  std::uniform_real_distribution<double> lam(0.0, 1.5);
  std::bernoulli_distribution fused_input(0.3);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len(rng);
    Vector v = random_vector(rng, n, 2.0);
    // Some inputs with repeated entries to exercise exact ties.
    if (fused_input(rng) && n > 2) v(1) = v(0);
    const double l1 = lam(rng), l2 = lam(rng);
    const Vector x = tv_chain_prox(v, l2);
    const Matrix ours = fused_jacobian(v, l1, l2).dense();
    worst = std::max(worst, (ours - ft::fused_jacobian_pinv_oracle(x, l1)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, fmt("1000 fibers, max abs error = %.2e (<= 1e-10)", worst)};
}

// 4. Finite-difference and local linearization checks.
Outcome derivative_checks() {
  std::mt19937_64 rng(104);
  const std::vector<double> ts{1e-4, 1e-5, 1e-6};
  bool ok = true;
  double worst_phi = 0, worst_grad = 0;

  // d/dt phi+(W + tB) with the error bounded by C t, C = 10 (1 + ||B||^2).
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 8;
    const Matrix w = ft::random_symmetric(rng, p, 2.0), b = ft::random_symmetric(rng, p, 1.0);
    const double beta = 0.5;
    const Matrix d = phi_plus_dderiv(make_phi_derivative_cache(sym_eig(w), beta), b);
    for (double t : ts) {
      const Matrix fd = (phi_plus(sym_eig(w + t * b), beta) - phi_plus(sym_eig(w - t * b), beta)) / (2 * t);
      const double ratio = (fd - d).norm() / (t * (1 + b.squaredNorm()));
      worst_phi = std::max(worst_phi, ratio);
    }
  }
  ok = ok && worst_phi <= 10.0;

  // Gradient of the regularized dual against differences of its value.
  for (int trial = 0; trial < 10; ++trial) {
    const int p = 6, num = 3;
    const ProblemData data{ft::random_sample_covariances(rng, p, num, 20), 0.1, 0.05};
    const SubproblemContext ctx(ft::random_spd_collection(rng, p, num), ft::random_spd_collection(rng, p, num),
                                ft::random_collection(rng, p, num, 0.2), 0.8, data);
    const auto x = ctx.x_k + ft::random_collection(rng, p, num, 0.1);
    const auto e = evaluate_phi_hat(ctx, x);
    auto d = ft::random_collection(rng, p, num, 1.0);
    d *= 1.0 / d.norm();
    const double slope = collection_inner(e.grad, d);
    for (double t : ts) {
      const double fd = (eval_phi_hat(ctx, x + t * d) - eval_phi_hat(ctx, x - t * d)) / (2 * t);
      // Values carry roundoff of order eps * scale, amplified by 1/t.
      const double noise = 64 * 2.2e-16 * e.value_scale / t;
      worst_grad = std::max(worst_grad, std::max(0.0, std::abs(fd - slope) - noise) / t);
    }
  }
  ok = ok && worst_grad <= 10.0 * (1 + 1.0);

  // Prox_{sigma P} is piecewise affine: between two points with the same
  // Jacobian element it is exactly linear.
  double worst_lin = 0.0;
  int accepted = 0;
  for (int trial = 0; trial < 2000 && accepted < 50; ++trial) {
    const int p = 5, num = 4;
    const double sigma = 1.3, l1 = 0.2, l2 = 0.15;
    const auto u = ft::random_collection(rng, p, num, 1.0);
    auto delta = ft::random_collection(rng, p, num, 1.0);
    delta *= 1e-3 / delta.norm();
    const auto j0 = fgl_jacobian(u, sigma, l1, l2);
    const auto j1 = fgl_jacobian(u + delta, sigma, l1, l2);
    bool same = true;
    for (int i = 0; i < p && same; ++i)
      for (int k = i + 1; k < p && same; ++k) {
        const auto a = j0.element(i, k), b = j1.element(i, k);
        same = a.block_start == b.block_start && a.upsilon == b.upsilon;
      }
    if (!same) continue;
    ++accepted;
    const auto lhs = prox_fgl(u + delta, sigma * l1, sigma * l2) - prox_fgl(u, sigma * l1, sigma * l2);
    worst_lin = std::max(worst_lin, (lhs - j0.apply(delta)).norm() / delta.norm());
  }
  ok = ok && accepted >= 50 && worst_lin <= 1e-12;

  return {ok, fmt("phi+' err/t max %.1e (<= 10), grad err/t max %.1e (<= 20), linearization %.1e ||D|| "
                  "over %d segments (<= 1e-12)",
                  worst_phi, worst_grad, worst_lin, accepted)};
}

struct PairRun {
  std::string name;
  SolverReport rppa;
  SolverReport admm;
};

std::vector<PairRun> g_nn_runs;  // reused by criterion 6

// 5. rPPA and ADMM agree on random and nearest-neighbour instances.
Outcome cross_solver() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<PairRun> runs;
  std::mt19937_64 rng(105);
  RppaParams rp;
  AdmmParams ap;
  for (int k = 0; k < 10; ++k) {
    const ProblemData data{ft::random_sample_covariances(rng, 50, 3, 100), 0.1, 0.05};
    runs.push_back({"random " + std::to_string(k), rppa_solve(data, rp), admm_solve(data, ap)});
  }
  for (int k = 0; k < 3; ++k) {
    const auto inst = gen_nearest_neighbour(100, 3, 5, 500 + k, 500);
    std::vector<Matrix> s;
    for (const auto& x : inst.samples) s.push_back(sample_covariance(x));
    const ProblemData data{MatrixCollection(std::move(s)), 0.05, 0.01};
    runs.push_back({"nn " + std::to_string(k), rppa_solve(data, rp), admm_solve(data, ap)});
    g_nn_runs.push_back(runs.back());
  }
  const double secs = seconds_since(t0);
  bool ok = secs < 600.0;
  double worst_eta = 0, worst_gap = 0, worst_theta = 0;
  for (const auto& r : runs) {
    worst_eta = std::max({worst_eta, r.rppa.eta, r.admm.eta});
    worst_gap = std::max(worst_gap, std::abs(relative_objective_gap(r.admm.objective, r.rppa.objective)));
    worst_theta = std::max(worst_theta, (r.rppa.Theta - r.admm.Theta).norm() / (1 + r.rppa.Theta.norm()));
    ok = ok && r.rppa.converged && r.admm.converged;
  }
  ok = ok && worst_eta <= 1e-6 && worst_gap <= 1e-6 && worst_theta <= 1e-4;
  return {ok, fmt("13 instances, max eta %.1e, max rel obj diff %.1e, max rel dTheta %.1e, %.0f s (< 600 s)",
                  worst_eta, worst_gap, worst_theta, secs)};
}

// 6. Iteration counts on the nearest-neighbour instances.
Outcome efficiency() {
  if (g_nn_runs.empty()) return {false, "criterion 5 produced no runs"};
  bool ok = true;
  std::string detail;
  for (const auto& r : g_nn_runs) {
    const int combined = r.rppa.total_newton;
    const bool this_ok = r.rppa.converged && r.rppa.outer_iterations <= 40 && r.rppa.max_newton_per_outer <= 30 &&
                         r.admm.outer_iterations >= 5 * combined;
    ok = ok && this_ok;
    detail += fmt("[%s: outer %d, max newton %d, newton total %d, warm %d, admm %d] ", r.name.c_str(),
                  r.rppa.outer_iterations, r.rppa.max_newton_per_outer, combined, r.rppa.warm_start_iterations,
                  r.admm.outer_iterations);
  }
  return {ok, detail + "(outer <= 40, newton/ssn <= 30, admm >= 5 x newton total)"};
}

// 7. Superlinear tail of one semismooth Newton solve.
Outcome ssn_tail() {
  std::mt19937_64 rng(107);
  const int p = 20, num = 3;
  const ProblemData data{ft::random_sample_covariances(rng, p, num, 60), 0.1, 0.05};
  const auto eye = MatrixCollection::identity(p, num);
  const SubproblemContext ctx(eye, eye, eye, 1.0, data);
  const auto res = ssn_solve(ctx, eye, SsnParams{}, [](const PhiHatEvaluation& e) { return e.grad_norm <= 1e-10; });
  const auto& tr = res.trace;
  if (tr.size() < 3) return {false, "fewer than three Newton records"};
  const double r0 = tr[tr.size() - 3].grad_norm, r1 = tr[tr.size() - 2].grad_norm, r2 = tr.back().grad_norm;
  const double c = std::max(r1 / std::pow(r0, 1.3), r2 / std::pow(r1, 1.3));
  return {res.converged && c <= 10.0,
          fmt("%d Newton steps, last norms %.2e %.2e %.2e, c = %.2e (<= 10)", res.newton_iterations, r0, r1, r2, c)};
}

// 8. Edge recovery along a lambda1 sweep. The grid is geometric in units of
// the noise level sqrt(log p / N), from 8x down to 0.5x.
Outcome recovery() {
  const int p = 100, n = 2000;
  const auto inst = gen_nearest_neighbour(p, 3, 5, 2024, n);
  std::vector<Matrix> s;
  for (const auto& x : inst.samples) s.push_back(sample_covariance(x));
  const MatrixCollection cov(std::move(s));
  const double unit = std::sqrt(std::log(double(p)) / n);
  std::vector<double> sweep;
  for (int k = 0; k < 12; ++k) sweep.push_back(unit * 8.0 * std::pow(0.5 / 8.0, k / 11.0));
  const double lambda2 = 0.005;
  struct Point {
    double l1;
    EdgeMetrics m;
  };
  std::vector<Point> pts;
  RppaParams rp;
  for (double l1 : sweep) {
    const auto rep = rppa_solve(ProblemData{cov, l1, lambda2}, rp);
    if (!rep.converged) return {false, fmt("rPPA did not converge at lambda1 = %g", l1)};
    pts.push_back({l1, edge_metrics(rep.Theta, inst.true_precisions)});
  }
  // Knee: the sweep point with the largest TP - FP.
  const auto knee = *std::max_element(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.m.tp_edges - a.m.fp_edges < b.m.tp_edges - b.m.fp_edges;
  });
  const long truth = knee.m.true_edges;
  const bool knee_ok = knee.m.tp_edges >= 0.85 * truth && knee.m.fp_edges <= 0.05 * knee.m.tp_edges;

  auto by_size = pts;
  std::stable_sort(by_size.begin(), by_size.end(),
                   [](const Point& a, const Point& b) { return a.m.selected_edges < b.m.selected_edges; });
  bool sse_ok = true;
  for (std::size_t k = 1; k < by_size.size(); ++k)
    sse_ok = sse_ok && by_size[k].m.sse <= 1.05 * by_size[k - 1].m.sse;

  return {knee_ok && sse_ok,
          fmt("knee lambda1 = %.4f: TP %ld / %ld true (%.1f%%), FP %ld (%.1f%% of TP); SSE %.3f -> %.3f, "
              "monotone within 5%%: %s",
              knee.l1, knee.m.tp_edges, truth, 100.0 * knee.m.tp_edges / truth, knee.m.fp_edges,
              100.0 * knee.m.fp_edges / std::max(1L, knee.m.tp_edges), by_size.front().m.sse, by_size.back().m.sse,
              sse_ok ? "yes" : "no")};
}

// 9. Metrics fixtures.
Outcome metrics_suite() {
  bool ok = true;
  const int p = 7, num = 3;
  const MatrixCollection ones(std::vector<Matrix>(num, Matrix::Ones(p, p)));
  const long expect = static_cast<long>(std::ceil(0.999 * p * p * num));
  const long got = nnz_mass(ones);
  ok = ok && got == expect;

  std::vector<Matrix> truth(2, Matrix::Identity(2, 2)), est(2, Matrix::Identity(2, 2));
  truth[0](0, 1) = truth[0](1, 0) = 0.3;
  truth[1](0, 1) = truth[1](1, 0) = 0.3 + 2e-6;  // a true differential edge
  est[0](0, 1) = est[0](1, 0) = 0.3;
  est[1](0, 1) = est[1](1, 0) = 0.3 + 5e-7;  // below the threshold
  const auto m = edge_metrics(MatrixCollection(est), MatrixCollection(truth));
  ok = ok && m.true_diff == 1 && m.tp_diff == 0 && m.fp_diff == 0;
  est[1](0, 1) = est[1](1, 0) = 0.3 + 1.5e-6;
  const auto m2 = edge_metrics(MatrixCollection(est), MatrixCollection(truth));
  ok = ok && m2.tp_diff == 1;

  Matrix two(2, 2);
  two << 1, 1, 3, 3;
  const Matrix cov = sample_covariance(two);
  ok = ok && cov == Matrix::Constant(2, 2, 2.0);

  return {ok, fmt("nnz equal mass %ld (expect %ld), diff threshold fixtures, two-point covariance %s", got, expect,
                  cov == Matrix::Constant(2, 2, 2.0) ? "exact" : "wrong")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 prox oracle suite", prox_oracle_suite}, {"2 phi+ identities", phi_identities},
      {"3 jacobian oracle", jacobian_oracle},     {"4 derivative checks", derivative_checks},
      {"5 cross-solver agreement", cross_solver}, {"6 rppa efficiency", efficiency},
      {"7 ssn superlinear tail", ssn_tail},       {"8 recovery sweep", recovery},
      {"9 metrics suite", metrics_suite},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
