#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "force2vec/csr_graph.hpp"
#include "force2vec/rng.hpp"
#include "force2vec/trainer.hpp"

namespace force2vec {

/// Coordinate-wise product (the link-prediction feature operator).
std::vector<float> hadamard(std::span<const float> a, std::span<const float> b);

struct LinkPair {
  VertexId u, v;
  bool is_edge;
};

/// Balanced positive/negative pairs, shuffled, split 50/50 train/test.
/// Negatives are verified non-edges. Positive count is capped at 10^6
/// for very large graphs.
struct LinkDataset {
  std::vector<LinkPair> train;
  std::vector<LinkPair> test;
};

LinkDataset build_link_dataset(const CsrGraph& g, Rng& rng);

struct FeatureMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<float> data;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), data(r * c, 0.0f) {}
  std::span<float> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const float> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
};

struct LogRegConfig {
  double lr = 0.1;
  int iters = 500;
  double l2 = 1e-4;
};

/// Binary logistic regression, full-batch gradient descent, bias included
/// as weights.back(). Deterministic (zero init, fixed iteration count).
struct LogRegModel {
  std::vector<double> weights;  // size cols+1

  double probability(std::span<const float> x) const;
};

LogRegModel fit_logreg(const FeatureMatrix& features,
                       const std::vector<int>& targets,
                       const LogRegConfig& cfg = {});

/// Mean L2-regularized logistic loss of a model on a dataset.
double logreg_loss(const LogRegModel& model, const FeatureMatrix& features,
                   const std::vector<int>& targets, double l2);

/// Held-out accuracy of a Hadamard-feature classifier trained on ds.train.
double link_prediction_accuracy(const EmbeddingMatrix& z, const LinkDataset& ds,
                                const LogRegConfig& cfg = {});

struct LabeledNodes {
  std::vector<std::vector<int>> labels;  // per-vertex label ids, sorted
  int num_classes = 0;
  bool multi_label = false;
};

/// "vertex_id label_id" per line; repeated vertex lines mean multi-label.
LabeledNodes load_labels(std::istream& in, VertexId n);

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
};

/// Per-class true-positive / false-positive / false-negative tallies.
struct ClassCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0;
};

/// Micro-F1 pools counts across classes; macro-F1 averages per-class F1,
/// counting classes with an empty denominator as 0.
F1Scores f1_from_counts(const std::vector<ClassCounts>& counts);

/// One-vs-rest logistic regression on a stratified random split.
/// Single-label: argmax prediction. Multi-label: top-l classes with l the
/// vertex's true label count.
F1Scores node_classification(const EmbeddingMatrix& z, const LabeledNodes& labels,
                             double train_fraction, Rng& rng,
                             const LogRegConfig& cfg = {});

struct Clustering {
  std::vector<int> assignment;  // per-vertex cluster id in [0, k)
  int k = 0;
};

/// Lloyd's algorithm with k-means++ seeding. Empty clusters are re-seeded
/// at the point farthest from its centroid. Best of `restarts` by inertia.
Clustering kmeans(const EmbeddingMatrix& z, int k, Rng& rng, int restarts = 10,
                  int max_iters = 300);

double kmeans_inertia(const EmbeddingMatrix& z, const Clustering& c);

/// Newman modularity Q = sum_c [L_c/m - (d_c/(2m))^2].
double modularity(const CsrGraph& g, const Clustering& c);

struct SweepResult {
  int k = 0;
  double q = 0.0;
};

/// Max-modularity k-means clustering over k in [2, min(50, n)].
SweepResult best_modularity_sweep(const CsrGraph& g, const EmbeddingMatrix& z,
                                  Rng& rng, int kmax = 50);

}  // namespace force2vec
