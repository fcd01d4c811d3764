#include <benchmark/benchmark.h>

#include <random>

#include "fgl/jacobian.hpp"
#include "fgl/proximal.hpp"
#include "fgl/ssn.hpp"

namespace {

fgl::MatrixCollection random_collection(std::mt19937_64& rng, int p, int num, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<fgl::Matrix> out;
  for (int l = 0; l < num; ++l) {
    fgl::Matrix a(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) a(i, j) = g(rng);
    out.push_back(0.5 * (a + a.transpose()));
  }
  return fgl::MatrixCollection(std::move(out));
}

fgl::MatrixCollection spd_collection(std::mt19937_64& rng, int p, int num) {
  auto c = random_collection(rng, p, num, 1.0);
  std::vector<fgl::Matrix> out;
  for (std::size_t l = 0; l < c.size(); ++l)
    out.push_back(c[l] * c[l] / p + fgl::Matrix::Identity(p, p));
  return fgl::MatrixCollection(std::move(out));
}

void BM_ProxFgl(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto u = random_collection(rng, static_cast<int>(state.range(0)), 3, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(fgl::prox_fgl(u, 0.1, 0.05));
}
BENCHMARK(BM_ProxFgl)->Arg(50)->Arg(100)->Arg(200);

void BM_SymEig(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto a = random_collection(rng, static_cast<int>(state.range(0)), 1, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fgl::sym_eig(a[0]));
}
BENCHMARK(BM_SymEig)->Arg(50)->Arg(100)->Arg(200);

void BM_NewtonApply(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  const fgl::ProblemData data{spd_collection(rng, p, 3), 0.1, 0.05};
  const fgl::SubproblemContext ctx(fgl::MatrixCollection::identity(p, 3), fgl::MatrixCollection::identity(p, 3),
                                   fgl::MatrixCollection::identity(p, 3), 1.0, data);
  const auto e = fgl::evaluate_phi_hat(ctx, ctx.x_k);
  const auto n = fgl::make_newton_operator(ctx, e);
  const auto d = random_collection(rng, p, 3, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fgl::newton_apply(n, d));
}
BENCHMARK(BM_NewtonApply)->Arg(50)->Arg(100);

void BM_SsnSubproblem(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  const fgl::ProblemData data{spd_collection(rng, p, 3), 0.1, 0.05};
  const fgl::SubproblemContext ctx(fgl::MatrixCollection::identity(p, 3), fgl::MatrixCollection::identity(p, 3),
                                   fgl::MatrixCollection::identity(p, 3), 1.0, data);
  auto stop = [](const fgl::PhiHatEvaluation& ev) { return ev.grad_norm <= 1e-8; };
  for (auto _ : state) benchmark::DoNotOptimize(fgl::ssn_solve(ctx, ctx.x_k, fgl::SsnParams{}, stop));
}
BENCHMARK(BM_SsnSubproblem)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
