#include "force2vec/sampling.hpp"

#include <numeric>

namespace force2vec {

EpochPartition partition_epoch(VertexId n, VertexId b, Rng& rng) {
  if (b == 0 || b > n) throw UsageError("batch size must be in [1, n]");
  EpochPartition part;
  part.batch_size = b;
  part.perm.resize(n);
  std::iota(part.perm.begin(), part.perm.end(), VertexId{0});
  // Fisher-Yates
  for (VertexId i = n; i > 1; --i) {
    const auto j = static_cast<VertexId>(rng.below(i));
    std::swap(part.perm[i - 1], part.perm[j]);
  }
  return part;
}

std::vector<VertexId> draw_negatives(VertexId n, std::uint32_t s, Rng& rng) {
  std::vector<VertexId> out(s);
  for (auto& v : out) v = static_cast<VertexId>(rng.below(n));
  return out;
}

std::vector<VertexId> gen_walk(const CsrGraph& g, VertexId u, std::uint32_t k,
                               Rng& rng) {
  std::vector<VertexId> walk;
  if (g.degree(u) == 0) return walk;
  walk.reserve(k);
  VertexId w = u;
  while (walk.size() < k) {
    if (g.degree(w) == 0) w = u;  // dead end: restart
    const auto row = g.neighbors(w);
    const VertexId next = row[rng.below(row.size())];
    walk.push_back(next);
    w = next;
  }
  return walk;
}

Minibatch build_minibatch(const CsrGraph& g, std::span<const VertexId> ids,
                          SampleMode mode, std::uint32_t s, Rng& rng) {
  if (ids.empty()) throw UsageError("build_minibatch: empty vertex slice");
  Minibatch batch;
  batch.vertices.assign(ids.begin(), ids.end());
  batch.mode = mode;
  batch.graph = &g;
  if (mode.kind == SampleMode::Kind::Walk) {
    batch.ctx_offsets.reserve(ids.size() + 1);
    batch.ctx_offsets.push_back(0);
    for (VertexId u : ids) {
      auto walk = gen_walk(g, u, mode.walk_length, rng);
      batch.ctx_ids.insert(batch.ctx_ids.end(), walk.begin(), walk.end());
      batch.ctx_offsets.push_back(batch.ctx_ids.size());
    }
  }
  batch.negatives = draw_negatives(g.num_vertices(), s, rng);
  return batch;
}

}  // namespace force2vec
