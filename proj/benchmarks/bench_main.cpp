#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "uglt/conjugate.hpp"
#include "uglt/dataset_io.hpp"
#include "uglt/identification.hpp"
#include "uglt/sampler.hpp"

namespace {

uglt::Dataset block_data(int m, int r, int T) {
  uglt::SimulationSpec spec;
  spec.T = T;
  spec.delta = uglt::block_structure(m, r);
  spec.sigma2 = Eigen::VectorXd::Constant(m, 0.3);
  spec.seed = 11;
  uglt::Dataset d = uglt::simulate_dataset(spec).data;
  uglt::standardize(d);
  return d;
}

void BM_CountingRule(benchmark::State& st) {
  const int m = static_cast<int>(st.range(0));
  const int r = static_cast<int>(st.range(1));
  std::mt19937_64 eng(5);
  std::bernoulli_distribution coin(0.5);
  std::vector<uglt::SparsityMatrix> pool;
  for (int n = 0; n < 64; ++n) {
    uglt::SparsityMatrix d(m, r);
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < m; ++i) d.set(i, j, coin(eng));
    pool.push_back(d);
  }
  std::size_t n = 0;
  for (auto _ : st) benchmark::DoNotOptimize(uglt::counting_rule_check(pool[n++ % pool.size()]));
}
BENCHMARK(BM_CountingRule)->Args({12, 5})->Args({30, 8})->Args({63, 16});

void BM_IndicatorLogOdds(benchmark::State& st) {
  const int q = static_cast<int>(st.range(0));
  const int T = 500;
  std::mt19937_64 eng(7);
  std::normal_distribution<double> z;
  Eigen::MatrixXd f(q + 1, T), y(1, T);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j <= q; ++j) f(j, t) = z(eng);
    y(0, t) = f.col(t).sum() + z(eng);
  }
  const uglt::CrossProducts cp = uglt::cross_products(f, y);
  std::vector<int> others(q);
  for (int j = 0; j < q; ++j) others[j] = j;
  const Eigen::VectorXd pv = Eigen::VectorXd::Ones(q);
  const uglt::SlabSpec slab{true, 1.0 / T};
  for (auto _ : st)
    benchmark::DoNotOptimize(uglt::indicator_log_odds(cp, 0, others, pv, q, 1.0, slab, uglt::IdioHyper{}));
}
BENCHMARK(BM_IndicatorLogOdds)->Arg(1)->Arg(4)->Arg(8);

void BM_Sweep(benchmark::State& st) {
  const int m = static_cast<int>(st.range(0));
  const int r = 3;
  const uglt::Dataset data = block_data(m, r, 500);
  uglt::PriorConfig prior;
  uglt::Rng rng(13);
  uglt::Sampler smp(data, prior, uglt::max_factors(m), rng);
  uglt::InitConfig init;
  init.r = r;
  smp.initialize(init);
  for (int warm = 0; warm < 200; ++warm) smp.sweep();
  for (auto _ : st) smp.sweep();
  st.counters["r"] = smp.r();
}
BENCHMARK(BM_Sweep)->Arg(15)->Arg(30)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
