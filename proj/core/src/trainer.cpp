#include "force2vec/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

namespace force2vec {

void TrainConfig::validate() const {
  if (dim < 1) throw UsageError("dim must be >= 1");
  if (batch < 1) throw UsageError("batch must be >= 1");
  if (negatives < 1) throw UsageError("negatives must be >= 1");
  if (!(lr > 0)) throw UsageError("lr must be > 0");
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (workers < 1) throw UsageError("workers must be >= 1");
  if (mode.kind == SampleMode::Kind::Walk && mode.walk_length < 1)
    throw UsageError("walk length must be >= 1 in walk mode");
}

namespace {

// Stream tags for deriving independent Rng streams from one seed.
constexpr std::uint64_t kStreamInit = 0x11;
constexpr std::uint64_t kStreamPartition = 0x22;
constexpr std::uint64_t kStreamSampling = 0x33;

// Run fn(worker_id) on `ranges.size()` workers; first range runs on the
// calling thread. Exceptions are rethrown on the caller.
void run_workers(std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1) {
    fn(0);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        fn(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  try {
    fn(0);
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

EmbeddingMatrix init_embedding(VertexId n, std::uint32_t d, Rng& rng) {
  if (n < 1 || d < 1) throw UsageError("init_embedding: n and d must be >= 1");
  const std::size_t total = std::size_t(n) * d;
  if (total / d != n)
    throw Error("init_embedding: n*d overflows addressable size");
  EmbeddingMatrix z(n, d);
  const double half = 0.5 / double(d);
  for (auto& x : z.data())
    x = static_cast<float>(rng.uniform(-half, half));
  return z;
}

BatchSchedule make_schedule(const CsrGraph& g, std::span<const VertexId> ids,
                            std::uint32_t workers, bool balanced) {
  if (workers < 1) throw UsageError("workers must be >= 1");
  const std::size_t b = ids.size();
  const std::size_t w = std::min<std::size_t>(workers, std::max<std::size_t>(b, 1));
  BatchSchedule sched;
  sched.worker_ranges.reserve(w);
  if (!balanced) {
    // static scheduling: equal vertex counts
    for (std::size_t i = 0; i < w; ++i) {
      const std::size_t lo = i * b / w;
      const std::size_t hi = (i + 1) * b / w;
      sched.worker_ranges.emplace_back(lo, hi);
    }
    return sched;
  }
  std::uint64_t total = 0;
  for (VertexId u : ids) total += g.degree(u);
  std::size_t pos = 0;
  std::uint64_t prefix = 0;
  for (std::size_t i = 0; i < w; ++i) {
    const std::size_t lo = pos;
    // advance until this worker's neighbor total reaches its share
    const std::uint64_t target = (i + 1) * total / w;
    while (pos < b && prefix < target) {
      prefix += g.degree(ids[pos]);
      ++pos;
    }
    if (i + 1 == w) pos = b;
    sched.worker_ranges.emplace_back(lo, pos);
  }
  return sched;
}

void grad_minibatch(const CsrGraph& g, const EmbeddingMatrix& z,
                    const Minibatch& batch, const ForceModel& model,
                    const BatchSchedule& schedule, GradBuffer& grads,
                    TrainCounters* counters) {
  const std::uint32_t d = z.dim();
  const std::size_t workers = schedule.worker_ranges.size();
  if (grads.rows != batch.vertices.size() || grads.dim != d)
    grads = GradBuffer(static_cast<VertexId>(batch.vertices.size()), d);

  std::vector<std::uint64_t> worker_neighbors(workers, 0);
  std::vector<VertexId> bad_vertex(workers, std::numeric_limits<VertexId>::max());

  run_workers(workers, [&](std::size_t w) {
    const auto [lo, hi] = schedule.worker_ranges[w];
    // Per-vertex register-blocked style: one d-length accumulator per
    // vertex, single write into the gradient buffer at the end.
    std::vector<double> acc(d);
    std::vector<double> pair(d);
    for (std::size_t i = lo; i < hi && bad_vertex[w] == std::numeric_limits<VertexId>::max(); ++i) {
      const VertexId u = batch.vertices[i];
      const auto z_u = z.row(u);
      std::fill(acc.begin(), acc.end(), 0.0);
      const auto ctx = batch.context(i);
      for (VertexId v : ctx) {
        pair_grad(model, z_u, z.row(v), /*attractive=*/true, pair);
        for (std::uint32_t j = 0; j < d; ++j) acc[j] += pair[j];
      }
      for (VertexId neg : batch.negatives) {
        pair_grad(model, z_u, z.row(neg), /*attractive=*/false, pair);
        for (std::uint32_t j = 0; j < d; ++j) acc[j] += pair[j];
      }
      worker_neighbors[w] += ctx.size();
      auto out = grads.row(i);
      for (std::uint32_t j = 0; j < d; ++j) {
        const float value = static_cast<float>(acc[j]);
        if (!std::isfinite(value)) bad_vertex[w] = u;
        out[j] = value;
      }
    }
  });

  for (std::size_t w = 0; w < workers; ++w)
    if (bad_vertex[w] != std::numeric_limits<VertexId>::max())
      throw NumericalError("non-finite gradient for vertex " +
                           std::to_string(bad_vertex[w]));

  if (counters) {
    std::uint64_t attr = 0;
    for (auto c : worker_neighbors) attr += c;
    counters->attractive_evals += attr;
    counters->repulsive_evals +=
        std::uint64_t(batch.vertices.size()) * batch.negatives.size();
    if (counters->worker_neighbor_totals.size() < workers)
      counters->worker_neighbor_totals.resize(workers, 0);
    for (std::size_t w = 0; w < workers; ++w)
      counters->worker_neighbor_totals[w] += worker_neighbors[w];
  }
}

void apply_update(EmbeddingMatrix& z, std::span<const VertexId> vertices,
                  const GradBuffer& grads, float eta) {
  const std::uint32_t d = z.dim();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    auto row = z.row(vertices[i]);
    const auto g = grads.row(i);
    for (std::uint32_t j = 0; j < d; ++j) row[j] -= eta * g[j];
  }
}

double batch_loss(const EmbeddingMatrix& z, const Minibatch& batch,
                  const ForceModel& model) {
  if (model.kind != ForceKind::Sigmoid && model.kind != ForceKind::TDist)
    throw UnsupportedError("batch_loss is defined for sigmoid and tdist only");
  double total = 0.0;
  for (std::size_t i = 0; i < batch.vertices.size(); ++i) {
    const auto z_u = z.row(batch.vertices[i]);
    for (VertexId v : batch.context(i))
      total += pair_loss(model, z_u, z.row(v), /*attractive=*/true);
    for (VertexId w : batch.negatives)
      total += pair_loss(model, z_u, z.row(w), /*attractive=*/false);
  }
  return total;
}

TrainResult train(const CsrGraph& g, const TrainConfig& cfg,
                  const ProgressFn& progress) {
  cfg.validate();
  if (cfg.monitor_loss && cfg.model.kind != ForceKind::Sigmoid &&
      cfg.model.kind != ForceKind::TDist)
    throw UnsupportedError("loss monitoring requires the sigmoid or tdist model");

  const VertexId n = g.num_vertices();
  const VertexId b = std::min<VertexId>(cfg.batch, n);

  TrainResult result;
  {
    Rng init_rng = Rng::keyed(cfg.seed, {kStreamInit});
    result.embedding = init_embedding(n, cfg.dim, init_rng);
  }
  EmbeddingMatrix& z = result.embedding;
  GradBuffer grads(b, cfg.dim);

  const auto start = std::chrono::steady_clock::now();
  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    float eta = cfg.lr;
    if (cfg.lr_decay == TrainConfig::LrDecay::LinearToZero)
      eta = cfg.lr * (1.0f - float(epoch) / float(cfg.epochs));

    Rng part_rng = Rng::keyed(cfg.seed, {kStreamPartition, epoch});
    EpochPartition part = partition_epoch(n, b, part_rng);

    double epoch_loss = 0.0;
    for (std::size_t bi = 0; bi < part.num_batches(); ++bi) {
      const auto ids = part.batch(bi);
      Rng batch_rng = Rng::keyed(cfg.seed, {kStreamSampling, epoch, bi});
      Minibatch batch =
          build_minibatch(g, ids, cfg.mode, cfg.negatives, batch_rng);
      BatchSchedule sched =
          make_schedule(g, ids, cfg.workers, cfg.balanced_schedule);
      try {
        grad_minibatch(g, z, batch, cfg.model, sched, grads, &result.counters);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (epoch " +
                             std::to_string(epoch) + ", batch " +
                             std::to_string(bi) + ")");
      }
      if (cfg.monitor_loss) epoch_loss += batch_loss(z, batch, cfg.model);
      apply_update(z, ids, grads, eta);
    }

    if (cfg.monitor_loss) result.epoch_loss.push_back(epoch_loss);
    if (progress) {
      const double elapsed_ms =
          std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - start)
              .count();
      progress(epoch,
               cfg.monitor_loss ? epoch_loss
                                : std::numeric_limits<double>::quiet_NaN(),
               elapsed_ms);
    }
  }
  return result;
}

}  // namespace force2vec
