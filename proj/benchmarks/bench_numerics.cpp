#include <benchmark/benchmark.h>

#include "optstudy/active_subspace.hpp"
#include "optstudy/eigen_sym.hpp"
#include "optstudy/optimize.hpp"
#include "optstudy/rng.hpp"
#include "optstudy/surrogate.hpp"

using namespace optstudy;

namespace {

Eigen::MatrixXd uniform_rows(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  UniformStream s(seed);
  Eigen::MatrixXd X(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) X(i, j) = s.next_unit();
  return X;
}

void BM_Jacobi(benchmark::State& state) {
  const auto m = state.range(0);
  const Eigen::MatrixXd a = uniform_rows(m, m, 1);
  const Eigen::MatrixXd c = a + a.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_eigen(c));
}
BENCHMARK(BM_Jacobi)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_FitOls(benchmark::State& state) {
  const auto m = state.range(0);
  const auto X = uniform_rows(8 * m, m, 2);
  const Eigen::VectorXd Q = (X * Eigen::VectorXd::LinSpaced(m, 1.0, 0.1)).array().exp();
  for (auto _ : state) benchmark::DoNotOptimize(fit_ols(X, Q));
}
BENCHMARK(BM_FitOls)->Arg(2)->Arg(4)->Arg(8);

void BM_FitQuadratic(benchmark::State& state) {
  const auto m = state.range(0);
  const auto X = uniform_rows(static_cast<Eigen::Index>(2 * quadratic_term_count(static_cast<std::size_t>(m))), m, 3);
  const Eigen::VectorXd Q = X.rowwise().squaredNorm();
  for (auto _ : state) benchmark::DoNotOptimize(fit_quadratic(X, Q));
}
BENCHMARK(BM_FitQuadratic)->Arg(2)->Arg(4)->Arg(8);

void BM_LbfgsbRosenbrock(benchmark::State& state) {
  Objective o;
  o.eval = [](const Eigen::VectorXd& x) { return std::pow(1 - x(0), 2) + 100 * std::pow(x(1) - x(0) * x(0), 2); };
  o.grad = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(2);
    g << -2 * (1 - x(0)) - 400 * x(0) * (x(1) - x(0) * x(0)), 200 * (x(1) - x(0) * x(0));
    return g;
  };
  o.lower = Eigen::Vector2d(-2, -2);
  o.upper = Eigen::Vector2d(2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(minimize_lbfgsb(o, Eigen::Vector2d(0.0, 0.0)));
}
BENCHMARK(BM_LbfgsbRosenbrock);

void BM_Bootstrap(benchmark::State& state) {
  const auto X = uniform_rows(32, 4, 4);
  const Eigen::VectorXd Q = (X * Eigen::Vector4d(1.0, 0.05, 0.02, 0.01)).array().exp();
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_direction(X, Q, static_cast<std::size_t>(state.range(0)), 7));
}
BENCHMARK(BM_Bootstrap)->Arg(50)->Arg(200);

} // namespace
BENCHMARK_MAIN();
