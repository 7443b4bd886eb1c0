#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "force2vec/csr_graph.hpp"
#include "force2vec/force_kernels.hpp"
#include "force2vec/rng.hpp"
#include "force2vec/sampling.hpp"

namespace force2vec {

struct TrainConfig {
  std::uint32_t dim = 128;
  VertexId batch = 384;
  std::uint32_t negatives = 6;
  float lr = 0.02f;
  std::uint32_t epochs = 1200;
  ForceModel model{};
  SampleMode mode = SampleMode::one_hop();
  std::uint64_t seed = 1;
  std::uint32_t workers = 1;
  enum class LrDecay { Constant, LinearToZero } lr_decay = LrDecay::Constant;
  bool monitor_loss = false;
  bool balanced_schedule = true;

  void validate() const;
};

/// n x d row-major single-precision embedding matrix.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(VertexId rows, std::uint32_t dim)
      : rows_(rows), dim_(dim), data_(std::size_t(rows) * dim, 0.0f) {}

  VertexId rows() const { return rows_; }
  std::uint32_t dim() const { return dim_; }
  std::span<float> row(VertexId u) {
    return {data_.data() + std::size_t(u) * dim_, dim_};
  }
  std::span<const float> row(VertexId u) const {
    return {data_.data() + std::size_t(u) * dim_, dim_};
  }
  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

 private:
  VertexId rows_ = 0;
  std::uint32_t dim_ = 0;
  std::vector<float> data_;
};

/// Entries i.i.d. uniform in [-0.5/d, +0.5/d].
EmbeddingMatrix init_embedding(VertexId n, std::uint32_t d, Rng& rng);

struct GradBuffer {
  VertexId rows = 0;
  std::uint32_t dim = 0;
  std::vector<float> data;

  GradBuffer() = default;
  GradBuffer(VertexId rows_, std::uint32_t dim_)
      : rows(rows_), dim(dim_), data(std::size_t(rows_) * dim_, 0.0f) {}
  std::span<float> row(std::size_t i) { return {data.data() + i * dim, dim}; }
  std::span<const float> row(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }
};

/// Contiguous per-worker ranges over a batch's vertex array.
struct BatchSchedule {
  std::vector<std::pair<std::size_t, std::size_t>> worker_ranges;  // [lo, hi)
};

/// balanced=false: equal vertex counts. balanced=true: split at degree
/// prefix-sum targets so per-worker neighbor totals are near-equal.
BatchSchedule make_schedule(const CsrGraph& g, std::span<const VertexId> ids,
                            std::uint32_t workers, bool balanced);

struct TrainCounters {
  std::uint64_t attractive_evals = 0;
  std::uint64_t repulsive_evals = 0;
  std::vector<std::uint64_t> worker_neighbor_totals;
};

/// Gradient of one minibatch: row(i) accumulates the attractive terms over
/// context(i) plus the repulsive terms over the shared negatives, reading
/// the pre-batch snapshot of z. Accumulation order is fixed (vertex-major,
/// context order as stored), so the result is identical for any worker count.
void grad_minibatch(const CsrGraph& g, const EmbeddingMatrix& z,
                    const Minibatch& batch, const ForceModel& model,
                    const BatchSchedule& schedule, GradBuffer& grads,
                    TrainCounters* counters = nullptr);

/// z_u <- z_u - eta * grad(u) for each batch vertex.
void apply_update(EmbeddingMatrix& z, std::span<const VertexId> vertices,
                  const GradBuffer& grads, float eta);

/// Monitored minibatch loss (sigmoid and tdist only).
double batch_loss(const EmbeddingMatrix& z, const Minibatch& batch,
                  const ForceModel& model);

struct TrainResult {
  EmbeddingMatrix embedding;
  std::vector<double> epoch_loss;  // empty unless monitoring
  TrainCounters counters;
};

/// progress(epoch, loss, elapsed_ms); loss is NaN when not monitored.
using ProgressFn = std::function<void(std::uint32_t, double, double)>;

TrainResult train(const CsrGraph& g, const TrainConfig& cfg,
                  const ProgressFn& progress = {});

}  // namespace force2vec
