#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fgl/rppa.hpp"
#include "oracles.hpp"

using namespace fgl;
namespace ft = fgl::testing;

TEST_CASE("geometric_sequence") {
  const auto s = geometric_sequence(0.5, 0.7);
  CHECK(s(0) == 0.5);
  CHECK(s(2) == doctest::Approx(0.5 * 0.49));
  CHECK_THROWS_AS(geometric_sequence(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("identity covariances without penalty") {
  const ProblemData data{MatrixCollection::identity(4, 3), 0.0, 0.0};
  RppaParams params;
  const auto rep = rppa_solve(data, params);
  CHECK(rep.converged);
  for (std::size_t l = 0; l < 3; ++l) CHECK((rep.Theta[l] - Matrix::Identity(4, 4)).norm() <= 1e-6);
  CHECK(rep.objective == doctest::Approx(12.0));
}

TEST_CASE("large lambda1 gives the diagonal solution") {
  std::mt19937_64 rng(1);
  const auto s = ft::random_sample_covariances(rng, 5, 3, 40);
  const ProblemData data{s, 10.0, 0.1};
  RppaParams params;
  params.tol = 1e-8;
  const auto rep = rppa_solve(data, params);
  REQUIRE(rep.converged);
  for (std::size_t l = 0; l < 3; ++l) {
    const Matrix expect = s[l].diagonal().cwiseInverse().asDiagonal();
    CHECK((rep.Theta[l] - expect).norm() <= 1e-6);
  }
}

TEST_CASE("rPPA and ADMM agree") {
  std::mt19937_64 rng(2);
  const ProblemData data{ft::random_sample_covariances(rng, 12, 3, 30), 0.1, 0.05};
  RppaParams rp;
  rp.tol = 1e-8;
  AdmmParams ap;
  ap.tol = 1e-8;
  const auto a = rppa_solve(data, rp);
  const auto b = admm_solve(data, ap);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(std::abs(relative_objective_gap(a.objective, b.objective)) <= 1e-7);
  CHECK((a.Theta - b.Theta).norm() <= 1e-5 * (1 + a.Theta.norm()));
  CHECK(kkt_residual_primal(a.Theta, a.Omega, a.X, data) == doctest::Approx(a.eta));
}

TEST_CASE("cold start converges and records its trace") {
  std::mt19937_64 rng(3);
  const ProblemData data{ft::random_sample_covariances(rng, 10, 2, 25), 0.08, 0.04};
  RppaParams params;
  params.warm_start_iters = 0;
  const auto rep = rppa_solve(data, params);
  REQUIRE(rep.converged);
  CHECK(rep.warm_start_iterations == 0);
  CHECK(rep.trace.size() == static_cast<std::size_t>(rep.outer_iterations + 1));
  CHECK(rep.trace.front().iteration == 0);
  int newton = 0, cg = 0;
  for (const auto& t : rep.trace) {
    newton += t.inner_iterations;
    cg += t.cg_iterations;
  }
  CHECK(newton == rep.total_newton);
  CHECK(cg == rep.total_cg);
  for (std::size_t k = 1; k < rep.trace.size(); ++k)
    CHECK(rep.trace[k].sigma == doctest::Approx(std::min(params.sigma0 * std::pow(1.6, k - 1.0), 1e6)));
}

TEST_CASE("kkt_residual_primal is invariant to a simultaneous relabelling") {
  std::mt19937_64 rng(4);
  const int p = 6;
  const ProblemData data{ft::random_sample_covariances(rng, p, 3, 20), 0.1, 0.1};
  const auto th = ft::random_spd_collection(rng, p, 3);
  const auto om = ft::random_spd_collection(rng, p, 3);
  const auto x = ft::random_spd_collection(rng, p, 3);
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(p);
  for (int i = 0; i < p; ++i) perm.indices()(i) = idx[i];
  auto permute = [&](const MatrixCollection& c) {
    std::vector<Matrix> out;
    for (std::size_t l = 0; l < c.size(); ++l) out.push_back(perm * c[l] * perm.transpose());
    return MatrixCollection(std::move(out));
  };
  const ProblemData pd{permute(data.S), data.lambda1, data.lambda2};
  const auto a = kkt_components_primal(th, om, x, data);
  const auto b = kkt_components_primal(permute(th), permute(om), permute(x), pd);
  CHECK(a.prox == doctest::Approx(b.prox).epsilon(1e-12));
  CHECK(a.feasibility == doctest::Approx(b.feasibility).epsilon(1e-12));
  CHECK(a.inverse == doctest::Approx(b.inverse).epsilon(1e-12));
}

TEST_CASE("warm_start") {
  std::mt19937_64 rng(5);
  const ProblemData data{ft::random_sample_covariances(rng, 5, 2, 20), 0.1, 0.1};
  const auto w0 = warm_start(data, 0, 1e-6);
  CHECK(w0.iterations == 0);
  for (std::size_t l = 0; l < 2; ++l) {
    CHECK(w0.start.theta[l] == Matrix::Identity(5, 5));
    CHECK(w0.start.x[l] == Matrix::Identity(5, 5));
  }
  const auto w = warm_start(data, 50, 1e-6);
  CHECK(w.iterations <= 50);
  CHECK(w.iterations > 0);
  CHECK(w.start.theta[0] == w.start.omega[0]);
}

TEST_CASE("RppaParams validation") {
  RppaParams p;
  p.sigma_growth = 0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = RppaParams{};
  p.eps_seq = nullptr;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = RppaParams{};
  p.ssn.rho = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("kkt_residual_primal is invariant to reversing the class order") {
  std::mt19937_64 rng(6);
  const int p = 5, num = 4;
  const ProblemData data{ft::random_sample_covariances(rng, p, num, 20), 0.15, 0.1};
  const auto th = ft::random_spd_collection(rng, p, num);
  const auto om = ft::random_spd_collection(rng, p, num);
  const auto x = ft::random_spd_collection(rng, p, num);
  auto reversed = [](const MatrixCollection& c) {
    auto m = c.matrices();
    std::reverse(m.begin(), m.end());
    return MatrixCollection(std::move(m));
  };
  const ProblemData rd{reversed(data.S), data.lambda1, data.lambda2};
  const auto a = kkt_components_primal(th, om, x, data);
  const auto b = kkt_components_primal(reversed(th), reversed(om), reversed(x), rd);
  CHECK(a.prox == doctest::Approx(b.prox).epsilon(1e-12));
  CHECK(a.feasibility == doctest::Approx(b.feasibility).epsilon(1e-12));
  CHECK(a.inverse == doctest::Approx(b.inverse).epsilon(1e-12));
}
