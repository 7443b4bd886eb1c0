#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "force2vec/trainer.hpp"

namespace f2v = force2vec;

namespace {

std::vector<float> random_vector(std::size_t d, f2v::Rng& rng) {
  std::vector<float> v(d);
  for (auto& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
  return v;
}

f2v::CsrGraph bench_graph(f2v::VertexId n, double p) {
  f2v::Rng rng(7, 0);
  std::vector<std::pair<f2v::VertexId, f2v::VertexId>> edges;
  for (f2v::VertexId u = 0; u < n; ++u)
    for (f2v::VertexId v = u + 1; v < n; ++v)
      if (rng.uniform() < p) edges.emplace_back(u, v);
  return f2v::CsrGraph::from_edges(std::move(edges), n, true);
}

void bm_pair_grad(benchmark::State& state, f2v::ForceKind kind, bool attractive) {
  const auto d = static_cast<std::size_t>(state.range(0));
  f2v::Rng rng(1, 0);
  const auto a = random_vector(d, rng);
  const auto b = random_vector(d, rng);
  std::vector<float> out(d);
  const f2v::ForceModel model{kind};
  for (auto _ : state) {
    f2v::pair_grad(model, a, b, attractive, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}

void bm_grad_minibatch(benchmark::State& state) {
  const auto workers = static_cast<std::uint32_t>(state.range(0));
  const f2v::CsrGraph g = bench_graph(2000, 0.01);
  f2v::Rng init(2, 0);
  const f2v::EmbeddingMatrix z = f2v::init_embedding(g.num_vertices(), 128, init);

  std::vector<f2v::VertexId> ids(g.num_vertices());
  std::iota(ids.begin(), ids.end(), f2v::VertexId{0});
  f2v::Rng srng(3, 0);
  const f2v::Minibatch batch =
      f2v::build_minibatch(g, ids, f2v::SampleMode::one_hop(), 6, srng);
  const f2v::BatchSchedule sched = f2v::make_schedule(g, ids, workers, true);
  const f2v::ForceModel model{f2v::ForceKind::TDist};
  f2v::GradBuffer grads;
  for (auto _ : state) {
    f2v::grad_minibatch(g, z, batch, model, sched, grads);
    benchmark::DoNotOptimize(grads.data.data());
  }
  state.SetItemsProcessed(state.iterations() * g.num_edges());
}

void bm_train_epoch(benchmark::State& state) {
  const f2v::CsrGraph g = bench_graph(1000, 0.01);
  f2v::TrainConfig cfg;
  cfg.dim = 64;
  cfg.epochs = 1;
  cfg.workers = static_cast<std::uint32_t>(state.range(0));
  cfg.model = f2v::ForceModel{f2v::ForceKind::Sigmoid};
  for (auto _ : state) {
    const f2v::TrainResult res = f2v::train(g, cfg);
    benchmark::DoNotOptimize(res.embedding.data().data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(bm_pair_grad, sigmoid_attractive, f2v::ForceKind::Sigmoid, true)
    ->Arg(16)->Arg(128);
BENCHMARK_CAPTURE(bm_pair_grad, sigmoid_repulsive, f2v::ForceKind::Sigmoid, false)
    ->Arg(16)->Arg(128);
BENCHMARK_CAPTURE(bm_pair_grad, tdist_attractive, f2v::ForceKind::TDist, true)
    ->Arg(16)->Arg(128);
BENCHMARK_CAPTURE(bm_pair_grad, tdist_repulsive, f2v::ForceKind::TDist, false)
    ->Arg(16)->Arg(128);
BENCHMARK_CAPTURE(bm_pair_grad, fr_attractive,
                  f2v::ForceKind::FruchtermanReingold, true)
    ->Arg(16)->Arg(128);
BENCHMARK(bm_grad_minibatch)->Arg(1)->Arg(2)->Arg(4)->Arg(8)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_train_epoch)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
