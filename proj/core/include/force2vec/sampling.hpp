#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "force2vec/csr_graph.hpp"
#include "force2vec/rng.hpp"

namespace force2vec {

struct SampleMode {
  enum class Kind { OneHop, Walk };
  Kind kind = Kind::OneHop;
  std::uint32_t walk_length = 0;

  static SampleMode one_hop() { return {Kind::OneHop, 0}; }
  static SampleMode walk(std::uint32_t k) { return {Kind::Walk, k}; }
};

/// One minibatch: vertex slice V_b, per-vertex neighbor context N_b, and
/// the negative set S_b shared by every vertex of the batch. In one-hop
/// mode the context is a zero-copy view into the graph's CSR rows.
struct Minibatch {
  std::vector<VertexId> vertices;
  std::vector<VertexId> negatives;
  SampleMode mode;
  const CsrGraph* graph = nullptr;     // one-hop context source
  std::vector<EdgeIndex> ctx_offsets;  // walk mode: size vertices.size()+1
  std::vector<VertexId> ctx_ids;

  std::span<const VertexId> context(std::size_t i) const {
    if (mode.kind == SampleMode::Kind::OneHop)
      return graph->neighbors(vertices[i]);
    return {ctx_ids.data() + ctx_offsets[i], ctx_ids.data() + ctx_offsets[i + 1]};
  }
};

/// A random permutation of 0..n-1 cut into ceil(n/b) consecutive chunks.
struct EpochPartition {
  std::vector<VertexId> perm;
  VertexId batch_size = 0;

  std::size_t num_batches() const {
    return (perm.size() + batch_size - 1) / batch_size;
  }
  std::span<const VertexId> batch(std::size_t i) const {
    const std::size_t lo = i * batch_size;
    const std::size_t hi = std::min(lo + batch_size, perm.size());
    return {perm.data() + lo, perm.data() + hi};
  }
};

EpochPartition partition_epoch(VertexId n, VertexId b, Rng& rng);

/// s ids i.i.d. uniform over [0, n); duplicates permitted.
std::vector<VertexId> draw_negatives(VertexId n, std::uint32_t s, Rng& rng);

/// k-step random walk from u (first step leaves u). Dead ends restart the
/// walk at u; an isolated start yields an empty walk.
std::vector<VertexId> gen_walk(const CsrGraph& g, VertexId u, std::uint32_t k,
                               Rng& rng);

Minibatch build_minibatch(const CsrGraph& g, std::span<const VertexId> ids,
                          SampleMode mode, std::uint32_t s, Rng& rng);

}  // namespace force2vec
