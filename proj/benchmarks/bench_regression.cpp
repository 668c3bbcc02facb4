#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "gdpx/regression.hpp"
#include "gdpx/rng.hpp"

namespace {

using namespace gdpx;

struct Problem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

Problem make_problem(Eigen::Index n, Eigen::Index p) {
  Rng rng(7);
  Problem pr;
  pr.X.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) pr.X(i, j) = rng.normal();
  }
  Eigen::VectorXd beta(p);
  for (Eigen::Index j = 0; j < p; ++j) beta(j) = rng.uniform(-2.0, 2.0);
  pr.y = pr.X * beta;
  for (Eigen::Index i = 0; i < n; ++i) pr.y(i) += rng.normal(0.0, 3.0);
  return pr;
}

void BM_FitOls(benchmark::State& state) {
  const Problem pr = make_problem(state.range(0), 41);
  for (auto _ : state) {
    auto fit = regression::fit_ols(pr.X, pr.y);
    benchmark::DoNotOptimize(fit);
  }
}
BENCHMARK(BM_FitOls)->Arg(1000)->Arg(10000);

void BM_FitRidge(benchmark::State& state) {
  const Problem pr = make_problem(state.range(0), 41);
  for (auto _ : state) {
    auto fit = regression::fit_ridge(pr.X, pr.y, 0.77);
    benchmark::DoNotOptimize(fit);
  }
}
BENCHMARK(BM_FitRidge)->Arg(1000)->Arg(10000);

void BM_FitLasso(benchmark::State& state) {
  const Problem pr = make_problem(state.range(0), 41);
  for (auto _ : state) {
    auto fit = regression::fit_lasso(pr.X, pr.y, 0.77);
    benchmark::DoNotOptimize(fit);
  }
}
BENCHMARK(BM_FitLasso)->Arg(1000)->Arg(10000);

void BM_CrossValidateRidge(benchmark::State& state) {
  const Problem pr = make_problem(state.range(0), 41);
  regression::Dataset data;
  data.X = pr.X;
  data.y = pr.y;
  data.names.resize(41, "x");
  data.dummy_mask.assign(41, 0);
  const auto grid = regression::default_lambda_grid();
  for (auto _ : state) {
    auto cv = regression::cross_validate(data, regression::ModelKind::Ridge, grid, 5, 11);
    benchmark::DoNotOptimize(cv);
  }
}
BENCHMARK(BM_CrossValidateRidge)->Arg(1000);

}  // namespace
