#include <benchmark/benchmark.h>

#include <vector>

#include "ihnn/dataset.hpp"
#include "ihnn/equilibrium.hpp"
#include "ihnn/linalg.hpp"
#include "ihnn/operators.hpp"
#include "ihnn/rng.hpp"
#include "ihnn/training.hpp"

namespace {

ihnn::Dataset make_data(std::size_t nodes, std::size_t edges) {
  ihnn::SynthConfig cfg;
  cfg.nodes = nodes;
  cfg.communities = 3;
  cfg.edges = edges;
  cfg.mean_edge_size = 4.0;
  cfg.feature_dim = 16;
  cfg.seed = 5;
  return ihnn::generate_synthetic(cfg);
}

void bm_spmm(benchmark::State& state) {
  const ihnn::Dataset data = make_data(static_cast<std::size_t>(state.range(0)),
                                       static_cast<std::size_t>(state.range(0)) * 4);
  const ihnn::NormalizedOperators ops = ihnn::build_block_operator(data.hypergraph, 0.95);
  ihnn::Rng rng(1);
  ihnn::DenseMatrix z(ops.a_block.rows, 32);
  for (double& x : z.values) x = rng.uniform(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ihnn::spmm(ops.a_block, z));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(ops.a_block.nnz()));
}
BENCHMARK(bm_spmm)->Arg(500)->Arg(2000)->Arg(8000);

void bm_forward_solve(benchmark::State& state) {
  const ihnn::Dataset data = make_data(static_cast<std::size_t>(state.range(0)),
                                       static_cast<std::size_t>(state.range(0)) * 4);
  const ihnn::NormalizedOperators ops = ihnn::build_block_operator(data.hypergraph, 0.95);
  const ihnn::ModelParams params =
      ihnn::init_params(16, 32, data.class_count, ops.kappa_radius, 3);
  ihnn::Rng rng(2);
  ihnn::DenseMatrix b(ops.a_block.rows, 32);
  for (double& x : b.values) x = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ihnn::forward_fixed_point(ops, params.w, b, ihnn::Activation::relu, {1e-6, 300}));
  }
}
BENCHMARK(bm_forward_solve)->Arg(500)->Arg(2000);

void bm_projection(benchmark::State& state) {
  ihnn::Rng rng(3);
  const std::size_t d = static_cast<std::size_t>(state.range(0));
  ihnn::DenseMatrix w(d, d);
  for (auto _ : state) {
    state.PauseTiming();
    for (double& x : w.values) x = rng.uniform(-1.0, 1.0);
    state.ResumeTiming();
    ihnn::project_rows_l1_inplace(w, 0.5);
    benchmark::DoNotOptimize(w.values.data());
  }
}
BENCHMARK(bm_projection)->Arg(32)->Arg(128)->Arg(512);

void bm_opnorm(benchmark::State& state) {
  const ihnn::Dataset data = make_data(static_cast<std::size_t>(state.range(0)),
                                       static_cast<std::size_t>(state.range(0)) * 4);
  const ihnn::SparseMatrix lve = ihnn::build_lve(data.hypergraph);
  for (auto _ : state)
    benchmark::DoNotOptimize(ihnn::build_block_operator(lve, 0.95).opnorm_a);
}
BENCHMARK(bm_opnorm)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
