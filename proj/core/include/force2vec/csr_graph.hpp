#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "force2vec/errors.hpp"

namespace force2vec {

#ifdef FORCE2VEC_WIDE_INDEX
using VertexId = std::uint64_t;
#else
using VertexId = std::uint32_t;
#endif
using EdgeIndex = std::uint64_t;

/// Immutable compressed-sparse-row adjacency. Stored arcs are directed;
/// symmetric construction inserts the reverse of every input arc.
/// Rows are sorted, deduplicated, and free of self-loops. Safe for
/// unsynchronized concurrent reads once built.
class CsrGraph {
 public:
  CsrGraph() = default;

  /// Build from an arc list. Ids must already be dense in [0, n).
  /// Duplicates and self-loops are dropped; counts are reported through
  /// the optional out-params.
  static CsrGraph from_edges(std::vector<std::pair<VertexId, VertexId>> edges,
                             VertexId n, bool symmetrize,
                             std::uint64_t* duplicates_dropped = nullptr,
                             std::uint64_t* self_loops_dropped = nullptr);

  VertexId num_vertices() const { return num_vertices_; }
  EdgeIndex num_edges() const { return col_indices_.size(); }  // stored arcs
  bool symmetric() const { return symmetric_; }

  std::span<const VertexId> neighbors(VertexId u) const {
    if (u >= num_vertices_) throw RangeError("vertex id out of range");
    return {col_indices_.data() + row_offsets_[u],
            col_indices_.data() + row_offsets_[u + 1]};
  }

  VertexId degree(VertexId u) const {
    return static_cast<VertexId>(row_offsets_[u + 1] - row_offsets_[u]);
  }

  /// Binary search within the sorted row.
  bool has_edge(VertexId u, VertexId v) const;

  const std::vector<EdgeIndex>& row_offsets() const { return row_offsets_; }
  const std::vector<VertexId>& col_indices() const { return col_indices_; }

  /// Original input ids by dense id; empty when the input was already dense.
  const std::vector<std::uint64_t>& original_ids() const { return original_ids_; }
  void set_original_ids(std::vector<std::uint64_t> ids) { original_ids_ = std::move(ids); }

 private:
  VertexId num_vertices_ = 0;
  std::vector<EdgeIndex> row_offsets_{0};
  std::vector<VertexId> col_indices_;
  std::vector<std::uint64_t> original_ids_;
  bool symmetric_ = false;
};

struct DegreeHistogram {
  std::vector<VertexId> degrees;   // length n
  std::vector<EdgeIndex> prefix;   // length n+1, prefix[n] == num_edges
};

DegreeHistogram degree_histogram(const CsrGraph& g);

struct LoadOptions {
  bool symmetrize = true;
  bool one_indexed = false;  // edge-list only; Matrix Market is always 1-indexed
};

struct LoadStats {
  std::uint64_t duplicates_dropped = 0;
  std::uint64_t self_loops_dropped = 0;
  std::uint64_t remapped = 0;  // nonzero when a dense-id remap was built
};

/// Text edge list: "u v[ w]" per line, '#'/'%' comments, LF or CRLF.
/// Weights are parsed and discarded. Sparse ids are remapped to dense
/// 0-based ids (table kept on the graph).
CsrGraph load_edge_list(std::istream& in, const LoadOptions& opts = {},
                        LoadStats* stats = nullptr);

/// Matrix Market coordinate format, pattern/real/integer, general/symmetric.
CsrGraph load_matrix_market(std::istream& in, const LoadOptions& opts = {},
                            LoadStats* stats = nullptr);

/// One stored arc per line; reloading with symmetrize=false reproduces
/// the graph exactly.
void write_edge_list(const CsrGraph& g, std::ostream& out);

/// Two-column "original_id dense_id" table.
void write_remap_table(const CsrGraph& g, std::ostream& out);

}  // namespace force2vec
