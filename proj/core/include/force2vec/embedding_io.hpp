#pragma once

#include <iosfwd>

#include "force2vec/evaluation.hpp"
#include "force2vec/trainer.hpp"

namespace force2vec {

/// Text embedding file: header "n d", then n lines "vertex_id f_1 ... f_d".
/// Values are serialized with shortest round-trip-exact decimal formatting,
/// so write followed by read is bitwise lossless.
void write_embedding(std::ostream& out, const EmbeddingMatrix& z);

/// Rows are placed by vertex id regardless of body line order; ids must be
/// a permutation of 0..n-1.
EmbeddingMatrix read_embedding(std::istream& in);

/// Tab-separated "vertex_id x y [label]" rows; embedding must be 2-D.
void write_layout_tsv(std::ostream& out, const EmbeddingMatrix& z,
                      const LabeledNodes* labels = nullptr);

/// SVG scatter of a 2-D embedding, points colored by label id.
void write_layout_svg(std::ostream& out, const EmbeddingMatrix& z,
                      const LabeledNodes* labels = nullptr);

}  // namespace force2vec
