// Microbenchmarks for the hot paths: transfer-operator solves, cylinder
// probabilities, the full estimator, and limit-law sampling.

#include <benchmark/benchmark.h>

#include "gibbsfit/asymptotics.hpp"
#include "gibbsfit/inference.hpp"
#include "gibbsfit/models.hpp"
#include "gibbsfit/sampling.hpp"
#include "gibbsfit/thermo.hpp"

namespace {

using namespace gibbsfit;

void bm_solve_markov(benchmark::State& state) {
  const auto spec = full_shift(static_cast<int>(state.range(0)));
  const auto fam = markov_family(spec);
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(fam.dim(), 0.1);
  for (auto _ : state) {
    auto sys = solve_gibbs(spec, fam, theta);
    benchmark::DoNotOptimize(sys.pressure());
  }
}
BENCHMARK(bm_solve_markov)->Arg(2)->Arg(3)->Arg(4);

void bm_cylinder_log_prob(benchmark::State& state) {
  const auto spec = full_shift(2);
  const auto fam = markov_family(spec);
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(fam.dim(), 0.2);
  const auto sys = solve_gibbs(spec, fam, theta);
  const auto s = sample_path(sys, static_cast<int>(state.range(0)), 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(cylinder_log_prob(sys, s.symbols));
}
BENCHMARK(bm_cylinder_log_prob)->Arg(1024)->Arg(16384);

void bm_mle_bernoulli(benchmark::State& state) {
  const auto spec = full_shift(2);
  const auto fam = bernoulli_family(2);
  Eigen::VectorXd theta(1);
  theta << 0.4;
  const auto sys = solve_gibbs(spec, fam, theta);
  const auto s = sample_path(sys, static_cast<int>(state.range(0)), 2, 0);
  for (auto _ : state) {
    auto fit = mle(spec, fam, s.symbols);
    benchmark::DoNotOptimize(fit.theta_hat);
  }
}
BENCHMARK(bm_mle_bernoulli)->Arg(1024)->Arg(8192);

void bm_mle_markov(benchmark::State& state) {
  const auto spec = full_shift(2);
  const auto fam = markov_family(spec);
  Eigen::MatrixXd p(2, 2);
  p << 0.3, 0.7, 0.6, 0.4;
  const auto sys = solve_gibbs(spec, fam, markov_to_theta(spec, p));
  const auto s = sample_path(sys, static_cast<int>(state.range(0)), 3, 0);
  for (auto _ : state) {
    auto fit = mle(spec, fam, s.symbols);
    benchmark::DoNotOptimize(fit.theta_hat);
  }
}
BENCHMARK(bm_mle_markov)->Arg(4096);

void bm_limit_law(benchmark::State& state) {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.3, 0.3, 0.7;
  for (auto _ : state) {
    auto sample = limit_law_sample(sigma, static_cast<int>(state.range(0)), 7);
    benchmark::DoNotOptimize(sample.xi_draws.back());
  }
}
BENCHMARK(bm_limit_law)->Arg(1000)->Arg(10000);

void bm_asymptotic_covariance(benchmark::State& state) {
  const auto spec = full_shift(3);
  const auto fam = markov_family(spec);
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(fam.dim(), 0.05);
  const auto sys = solve_gibbs(spec, fam, theta);
  for (auto _ : state) benchmark::DoNotOptimize(asymptotic_covariance(sys));
}
BENCHMARK(bm_asymptotic_covariance);

}  // namespace

BENCHMARK_MAIN();
