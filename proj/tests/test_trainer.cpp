#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numeric>
#include <string>
#include <vector>

#include "force2vec/trainer.hpp"
#include "support/oracles.hpp"
#include "support/test_graphs.hpp"

using namespace force2vec;
using f2v_test::Vec;

namespace {

EmbeddingMatrix random_embedding(VertexId n, std::uint32_t d, std::uint64_t seed) {
  Rng rng(seed, 0);
  EmbeddingMatrix z(n, d);
  for (auto& x : z.data()) x = static_cast<float>(rng.uniform(-1.0, 1.0));
  return z;
}

std::uint64_t max_load(const CsrGraph& g, std::span<const VertexId> ids,
                       const BatchSchedule& sched) {
  std::uint64_t worst = 0;
  for (auto [lo, hi] : sched.worker_ranges) {
    std::uint64_t load = 0;
    for (std::size_t i = lo; i < hi; ++i) load += g.degree(ids[i]);
    worst = std::max(worst, load);
  }
  return worst;
}

void check_partition(const BatchSchedule& sched, std::size_t b) {
  REQUIRE(!sched.worker_ranges.empty());
  CHECK(sched.worker_ranges.front().first == 0);
  CHECK(sched.worker_ranges.back().second == b);
  for (std::size_t i = 1; i < sched.worker_ranges.size(); ++i)
    CHECK(sched.worker_ranges[i].first == sched.worker_ranges[i - 1].second);
}

}  // namespace

TEST_SUITE_BEGIN("trainer");

TEST_CASE("init embedding: range, mean, determinism") {
  const VertexId n = 400;
  const std::uint32_t d = 32;
  Rng rng(41, 0);
  const EmbeddingMatrix z = init_embedding(n, d, rng);
  const double half = 0.5 / d;
  double mean = 0;
  for (float x : z.data()) {
    CHECK(std::abs(x) <= half);
    mean += x;
  }
  mean /= z.data().size();
  // CLT: sd of the mean is (2*half)/sqrt(12*n*d)
  const double bound = 3.0 * (2.0 * half) / std::sqrt(12.0 * n * d);
  CHECK(std::abs(mean) < bound);

  Rng again(41, 0);
  const EmbeddingMatrix z2 = init_embedding(n, d, again);
  CHECK(z.data() == z2.data());

  Rng bad(41, 0);
  CHECK_THROWS_AS(init_embedding(0, d, bad), UsageError);
  CHECK_THROWS_AS(init_embedding(n, 0, bad), UsageError);
}

TEST_CASE("static schedule splits vertices evenly") {
  const CsrGraph g = f2v_test::path_graph(10);
  std::vector<VertexId> ids(10);
  std::iota(ids.begin(), ids.end(), VertexId{0});

  const BatchSchedule s3 = make_schedule(g, ids, 3, false);
  check_partition(s3, 10);
  CHECK(s3.worker_ranges ==
        std::vector<std::pair<std::size_t, std::size_t>>{{0, 3}, {3, 6}, {6, 10}});

  // more workers than vertices: clamp to the batch size
  const BatchSchedule s20 = make_schedule(g, ids, 20, false);
  CHECK(s20.worker_ranges.size() == 10);
  check_partition(s20, 10);
}

TEST_CASE("balanced schedule equalizes neighbor totals") {
  // two hubs of degree 8 with degree-1 leaves
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (VertexId leaf = 2; leaf < 10; ++leaf) edges.emplace_back(0, leaf);
  for (VertexId leaf = 10; leaf < 18; ++leaf) edges.emplace_back(1, leaf);
  const CsrGraph g = CsrGraph::from_edges(std::move(edges), 18, true);
  std::vector<VertexId> ids{0, 2, 3, 1};  // degrees 8, 1, 1, 8
  const BatchSchedule sched = make_schedule(g, ids, 2, true);
  check_partition(sched, 4);
  CHECK(sched.worker_ranges ==
        std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {2, 4}});
  CHECK(max_load(g, ids, sched) == 9);
}

TEST_CASE("balanced schedule respects the greedy prefix bound") {
  Rng rng(42, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const CsrGraph g = f2v_test::random_graph(60, 0.1, rng);
    std::vector<VertexId> ids(g.num_vertices());
    std::iota(ids.begin(), ids.end(), VertexId{0});
    std::uint64_t total = 0, max_deg = 0;
    for (VertexId u : ids) {
      total += g.degree(u);
      max_deg = std::max<std::uint64_t>(max_deg, g.degree(u));
    }
    for (std::uint32_t w : {2u, 3u, 4u, 7u}) {
      const BatchSchedule bal = make_schedule(g, ids, w, true);
      check_partition(bal, ids.size());
      // greedy at prefix-sum targets: each load < fair share + one vertex
      CHECK(max_load(g, ids, bal) <= total / w + max_deg + 1);
    }
  }
}

TEST_CASE("minibatch gradient matches the unbatched oracle") {
  Rng grng(43, 0);
  const CsrGraph g = f2v_test::random_graph(30, 0.2, grng);
  const std::uint32_t d = 16;
  const EmbeddingMatrix z = random_embedding(g.num_vertices(), d, 44);

  std::vector<VertexId> ids(g.num_vertices());
  std::iota(ids.begin(), ids.end(), VertexId{0});
  Rng srng(45, 0);
  const Minibatch batch =
      build_minibatch(g, ids, SampleMode::one_hop(), 6, srng);

  for (ForceKind kind : {ForceKind::Sigmoid, ForceKind::TDist}) {
    const ForceModel model{kind};
    GradBuffer grads;
    const BatchSchedule sched = make_schedule(g, ids, 1, true);
    grad_minibatch(g, z, batch, model, sched, grads);

    for (std::size_t i = 0; i < ids.size(); ++i) {
      std::vector<Vec> ctx, neg;
      for (VertexId v : batch.context(i)) ctx.push_back(f2v_test::to_vec(z.row(v)));
      for (VertexId w : batch.negatives) neg.push_back(f2v_test::to_vec(z.row(w)));
      const Vec ref = f2v_test::ref_vertex_grad(model, f2v_test::to_vec(z.row(ids[i])),
                                                ctx, neg);
      const auto got = grads.row(i);
      for (std::uint32_t j = 0; j < d; ++j) {
        const double scale = std::max(std::abs(ref[j]), 1.0);
        CHECK(std::abs(ref[j] - got[j]) / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("gradients are bitwise identical for any worker count") {
  Rng grng(46, 0);
  const CsrGraph g = f2v_test::random_graph(80, 0.08, grng);
  const EmbeddingMatrix z = random_embedding(g.num_vertices(), 24, 47);
  std::vector<VertexId> ids(g.num_vertices());
  std::iota(ids.begin(), ids.end(), VertexId{0});
  Rng srng(48, 0);
  const Minibatch batch = build_minibatch(g, ids, SampleMode::one_hop(), 5, srng);
  const ForceModel model{ForceKind::TDist};

  GradBuffer base;
  grad_minibatch(g, z, batch, model, make_schedule(g, ids, 1, true), base);
  for (std::uint32_t w : {2u, 3u, 4u, 8u}) {
    for (bool balanced : {true, false}) {
      GradBuffer other;
      grad_minibatch(g, z, batch, model, make_schedule(g, ids, w, balanced),
                     other);
      REQUIRE(other.data.size() == base.data.size());
      CHECK(std::memcmp(other.data.data(), base.data.data(),
                        base.data.size() * sizeof(float)) == 0);
    }
  }
}

TEST_CASE("work counters account for every pair evaluation") {
  const CsrGraph g = f2v_test::star_graph(5);
  std::vector<VertexId> ids(g.num_vertices());
  std::iota(ids.begin(), ids.end(), VertexId{0});
  Rng srng(49, 0);
  const Minibatch batch = build_minibatch(g, ids, SampleMode::one_hop(), 3, srng);
  const EmbeddingMatrix z = random_embedding(g.num_vertices(), 4, 50);

  TrainCounters counters;
  GradBuffer grads;
  grad_minibatch(g, z, batch, ForceModel{ForceKind::Sigmoid},
                 make_schedule(g, ids, 2, true), grads, &counters);
  CHECK(counters.attractive_evals == g.num_edges());  // 10 arcs in the star
  CHECK(counters.repulsive_evals == ids.size() * 3);
  const std::uint64_t per_worker = std::accumulate(
      counters.worker_neighbor_totals.begin(),
      counters.worker_neighbor_totals.end(), std::uint64_t{0});
  CHECK(per_worker == counters.attractive_evals);
}

TEST_CASE("apply_update performs z -= eta * grad exactly") {
  EmbeddingMatrix z(2, 3);
  z.row(0)[0] = 1.0f; z.row(0)[1] = 2.0f; z.row(0)[2] = 3.0f;
  z.row(1)[0] = -1.0f;
  GradBuffer grads(1, 3);
  grads.row(0)[0] = 2.0f; grads.row(0)[1] = -4.0f; grads.row(0)[2] = 0.0f;
  const std::vector<VertexId> ids{1};
  apply_update(z, ids, grads, 0.5f);
  CHECK(z.row(1)[0] == -2.0f);
  CHECK(z.row(1)[1] == 2.0f);
  CHECK(z.row(1)[2] == 0.0f);
  CHECK(z.row(0)[0] == 1.0f);  // untouched
}

TEST_CASE("batch loss matches the reference sum") {
  Rng grng(51, 0);
  const CsrGraph g = f2v_test::two_triangles();
  const EmbeddingMatrix z = random_embedding(g.num_vertices(), 8, 52);
  std::vector<VertexId> ids(g.num_vertices());
  std::iota(ids.begin(), ids.end(), VertexId{0});
  Rng srng(53, 0);
  const Minibatch batch = build_minibatch(g, ids, SampleMode::one_hop(), 4, srng);

  for (ForceKind kind : {ForceKind::Sigmoid, ForceKind::TDist}) {
    double ref = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const Vec zu = f2v_test::to_vec(z.row(ids[i]));
      for (VertexId v : batch.context(i)) {
        const Vec zv = f2v_test::to_vec(z.row(v));
        ref += kind == ForceKind::Sigmoid
                   ? f2v_test::ref_loss_sigmoid_attractive(zu, zv)
                   : f2v_test::ref_loss_tdist_attractive(zu, zv);
      }
      for (VertexId w : batch.negatives) {
        const Vec zw = f2v_test::to_vec(z.row(w));
        if (kind == ForceKind::Sigmoid) {
          ref += f2v_test::ref_loss_sigmoid_repulsive(zu, zw);
        } else {
          // epsilon-clamped: a negative can coincide with the vertex itself
          const double t = f2v_test::ref_dist(zu, zw);
          const double t2 = std::max(t * t, 1e-6 * 1e-6);
          ref += -std::log(t2 / (1.0 + t2));
        }
      }
    }
    CHECK(batch_loss(z, batch, ForceModel{kind}) ==
          doctest::Approx(ref).epsilon(1e-5));
  }

  CHECK_THROWS_AS(
      batch_loss(z, batch, ForceModel{ForceKind::FruchtermanReingold}),
      UnsupportedError);
}

TEST_CASE("non-finite gradients raise a numerical error naming the vertex") {
  const CsrGraph g = f2v_test::triangle_graph();
  EmbeddingMatrix z(3, 4);
  for (auto& x : z.data()) x = 1e30f;
  z.row(1)[0] = -1e30f;  // distance ~ 2e30, r^2 overflows float
  std::vector<VertexId> ids{0, 1, 2};
  Rng srng(54, 0);
  const Minibatch batch = build_minibatch(g, ids, SampleMode::one_hop(), 1, srng);
  GradBuffer grads;
  CHECK_THROWS_WITH_AS(
      grad_minibatch(g, z, batch, ForceModel{ForceKind::FruchtermanReingold},
                     make_schedule(g, ids, 1, true), grads),
      doctest::Contains("vertex"), NumericalError);
}

TEST_CASE("train is bitwise reproducible across runs and worker counts") {
  Rng grng(55, 0);
  const CsrGraph g = f2v_test::random_graph(40, 0.15, grng);
  TrainConfig cfg;
  cfg.dim = 8;
  cfg.batch = 16;
  cfg.negatives = 4;
  cfg.epochs = 10;
  cfg.seed = 99;
  cfg.model = ForceModel{ForceKind::Sigmoid};

  const TrainResult a = train(g, cfg);
  const TrainResult b = train(g, cfg);
  CHECK(a.embedding.data() == b.embedding.data());

  cfg.workers = 4;
  const TrainResult c = train(g, cfg);
  CHECK(a.embedding.data() == c.embedding.data());

  cfg.seed = 100;
  const TrainResult d = train(g, cfg);
  CHECK(a.embedding.data() != d.embedding.data());
}

TEST_CASE("monitored training reduces the loss on a small graph") {
  const CsrGraph g = f2v_test::two_triangles();
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.batch = 6;
  cfg.negatives = 3;
  cfg.epochs = 80;
  cfg.lr = 0.05f;
  cfg.seed = 3;
  cfg.monitor_loss = true;
  cfg.model = ForceModel{ForceKind::Sigmoid};

  std::vector<std::uint32_t> seen_epochs;
  const TrainResult res = train(g, cfg, [&](std::uint32_t e, double loss, double ms) {
    seen_epochs.push_back(e);
    CHECK(std::isfinite(loss));
    CHECK(ms >= 0.0);
  });
  REQUIRE(res.epoch_loss.size() == cfg.epochs);
  CHECK(seen_epochs.size() == cfg.epochs);
  // average of the last 10 epochs beats the average of the first 10
  const auto avg = [&](std::size_t lo, std::size_t hi) {
    return std::accumulate(res.epoch_loss.begin() + lo,
                           res.epoch_loss.begin() + hi, 0.0) / (hi - lo);
  };
  CHECK(avg(70, 80) < avg(0, 10));
}

TEST_CASE("walk-mode training runs and batch size clamps to n") {
  const CsrGraph g = f2v_test::two_triangles();
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.batch = 384;  // > n: clamped internally
  cfg.negatives = 2;
  cfg.epochs = 3;
  cfg.mode = SampleMode::walk(5);
  cfg.model = ForceModel{ForceKind::TDist};
  const TrainResult res = train(g, cfg);
  CHECK(res.embedding.rows() == g.num_vertices());
  CHECK(res.counters.repulsive_evals == std::uint64_t(6) * 2 * 3);
}

TEST_CASE("config validation and unsupported monitoring") {
  const CsrGraph g = f2v_test::triangle_graph();
  TrainConfig cfg;
  cfg.dim = 0;
  CHECK_THROWS_AS(train(g, cfg), UsageError);

  cfg = TrainConfig{};
  cfg.epochs = 1;
  cfg.monitor_loss = true;
  cfg.model = ForceModel{ForceKind::LinLog};
  CHECK_THROWS_AS(train(g, cfg), UnsupportedError);
}

TEST_SUITE_END();
