#include "force2vec/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <string>
#include <unordered_set>

#include "force2vec/force_kernels.hpp"

namespace force2vec {

std::vector<float> hadamard(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size())
    throw RangeError("hadamard: dimension mismatch");
  std::vector<float> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

namespace {

constexpr std::size_t kMaxPositives = 1'000'000;

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

LinkDataset build_link_dataset(const CsrGraph& g, Rng& rng) {
  const VertexId n = g.num_vertices();
  if (g.num_edges() == 0) throw UsageError("link dataset needs at least one edge");

  std::vector<LinkPair> pairs;
  std::unordered_set<std::uint64_t> seen;
  auto key = [](VertexId a, VertexId b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(a) << 32) | b;
  };
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v : g.neighbors(u))
      if (seen.insert(key(u, v)).second) pairs.push_back({u, v, true});

  if (pairs.size() > kMaxPositives) {
    shuffle(pairs, rng);
    pairs.resize(kMaxPositives);
  }
  const std::size_t positives = pairs.size();
  const std::uint64_t all_pairs = std::uint64_t(n) * (n - 1) / 2;
  if (all_pairs <= positives)
    throw UsageError("graph too dense: no non-edges to sample");

  std::size_t negatives = 0;
  std::uint64_t attempts = 0;
  const std::uint64_t max_attempts = 1000 * std::uint64_t(positives) + 1000;
  while (negatives < positives) {
    if (++attempts > max_attempts)
      throw UsageError("could not sample enough distinct non-edges");
    const auto u = static_cast<VertexId>(rng.below(n));
    const auto v = static_cast<VertexId>(rng.below(n));
    if (u == v || g.has_edge(u, v)) continue;
    if (!seen.insert(key(u, v)).second) continue;
    pairs.push_back({u, v, false});
    ++negatives;
  }

  shuffle(pairs, rng);
  LinkDataset ds;
  const std::size_t half = pairs.size() / 2;
  ds.train.assign(pairs.begin(), pairs.begin() + half);
  ds.test.assign(pairs.begin() + half, pairs.end());
  return ds;
}

double LogRegModel::probability(std::span<const float> x) const {
  double s = weights.back();
  for (std::size_t i = 0; i < x.size(); ++i) s += weights[i] * double(x[i]);
  return stable_sigmoid(s);
}

LogRegModel fit_logreg(const FeatureMatrix& features,
                       const std::vector<int>& targets,
                       const LogRegConfig& cfg) {
  const std::size_t n = features.rows;
  const std::size_t d = features.cols;
  if (targets.size() != n)
    throw RangeError("fit_logreg: target count mismatch");
  const auto ones = std::count(targets.begin(), targets.end(), 1);
  if (ones == 0 || static_cast<std::size_t>(ones) == n)
    throw Error("fit_logreg: degenerate single-class input");

  LogRegModel model;
  model.weights.assign(d + 1, 0.0);
  std::vector<double> grad(d + 1);
  for (int it = 0; it < cfg.iters; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = features.row(i);
      const double err = model.probability(x) - targets[i];
      for (std::size_t j = 0; j < d; ++j) grad[j] += err * double(x[j]);
      grad[d] += err;
    }
    const double inv_n = 1.0 / double(n);
    for (std::size_t j = 0; j < d; ++j)
      model.weights[j] -= cfg.lr * (grad[j] * inv_n + cfg.l2 * model.weights[j]);
    model.weights[d] -= cfg.lr * grad[d] * inv_n;  // bias unregularized
  }
  for (double w : model.weights)
    if (!std::isfinite(w)) throw NumericalError("fit_logreg: non-finite weights");
  return model;
}

double logreg_loss(const LogRegModel& model, const FeatureMatrix& features,
                   const std::vector<int>& targets, double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < features.rows; ++i) {
    const double p = model.probability(features.row(i));
    const double eps = 1e-15;
    loss -= targets[i] ? std::log(std::max(p, eps))
                       : std::log(std::max(1.0 - p, eps));
  }
  loss /= double(features.rows);
  double reg = 0.0;
  for (std::size_t j = 0; j + 1 < model.weights.size(); ++j)
    reg += model.weights[j] * model.weights[j];
  return loss + 0.5 * l2 * reg;
}

double link_prediction_accuracy(const EmbeddingMatrix& z, const LinkDataset& ds,
                                const LogRegConfig& cfg) {
  const std::uint32_t d = z.dim();
  FeatureMatrix train(ds.train.size(), d);
  std::vector<int> targets(ds.train.size());
  for (std::size_t i = 0; i < ds.train.size(); ++i) {
    const auto& p = ds.train[i];
    const auto f = hadamard(z.row(p.u), z.row(p.v));
    std::copy(f.begin(), f.end(), train.row(i).begin());
    targets[i] = p.is_edge ? 1 : 0;
  }
  const LogRegModel model = fit_logreg(train, targets, cfg);

  std::size_t correct = 0;
  for (const auto& p : ds.test) {
    const auto f = hadamard(z.row(p.u), z.row(p.v));
    const bool predicted = model.probability(f) >= 0.5;
    if (predicted == p.is_edge) ++correct;
  }
  return double(correct) / double(ds.test.size());
}

LabeledNodes load_labels(std::istream& in, VertexId n) {
  LabeledNodes out;
  out.labels.resize(n);
  std::string line;
  std::size_t line_no = 0;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
    if (blank || line[0] == '#' || line[0] == '%') continue;
    std::uint64_t u = 0, label = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    auto [q1, e1] = std::from_chars(p, end, u);
    p = q1;
    while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    auto [q2, e2] = std::from_chars(p, end, label);
    if (e1 != std::errc() || e2 != std::errc())
      throw FormatError("bad label line " + std::to_string(line_no));
    if (u >= n)
      throw RangeError("label vertex id out of range at line " +
                       std::to_string(line_no));
    out.labels[u].push_back(static_cast<int>(label));
    max_label = std::max(max_label, static_cast<int>(label));
  }
  out.num_classes = max_label + 1;
  for (auto& ls : out.labels) {
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    if (ls.size() > 1) out.multi_label = true;
  }
  return out;
}

F1Scores f1_from_counts(const std::vector<ClassCounts>& counts) {
  std::uint64_t tp = 0, fp = 0, fn = 0;
  double macro = 0.0;
  for (const auto& c : counts) {
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
    const double denom = double(2 * c.tp + c.fp + c.fn);
    macro += denom > 0 ? 2.0 * double(c.tp) / denom : 0.0;
  }
  F1Scores s;
  const double denom = double(2 * tp + fp + fn);
  s.micro = denom > 0 ? 2.0 * double(tp) / denom : 0.0;
  s.macro = counts.empty() ? 0.0 : macro / double(counts.size());
  return s;
}

F1Scores node_classification(const EmbeddingMatrix& z, const LabeledNodes& labels,
                             double train_fraction, Rng& rng,
                             const LogRegConfig& cfg) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw UsageError("train_fraction must be in (0, 1)");
  const int num_classes = labels.num_classes;
  if (num_classes < 2) throw UsageError("need at least two classes");

  std::vector<VertexId> labeled;
  for (VertexId u = 0; u < z.rows(); ++u)
    if (u < labels.labels.size() && !labels.labels[u].empty()) labeled.push_back(u);
  if (labeled.empty()) throw UsageError("no labeled vertices");

  for (int attempt = 0; attempt < 10; ++attempt) {
    std::vector<VertexId> train_ids, test_ids;
    if (!labels.multi_label) {
      // stratified: split each class separately
      std::vector<std::vector<VertexId>> by_class(num_classes);
      for (VertexId u : labeled) by_class[labels.labels[u][0]].push_back(u);
      for (auto& members : by_class) {
        shuffle(members, rng);
        const std::size_t take = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(train_fraction * members.size())));
        for (std::size_t i = 0; i < members.size(); ++i)
          (i < take ? train_ids : test_ids).push_back(members[i]);
      }
    } else {
      std::vector<VertexId> order = labeled;
      shuffle(order, rng);
      const std::size_t take = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(train_fraction * order.size())));
      train_ids.assign(order.begin(), order.begin() + take);
      test_ids.assign(order.begin() + take, order.end());
    }
    if (test_ids.empty()) throw UsageError("train fraction leaves no test set");

    // every class must appear in training; otherwise re-split
    std::vector<bool> present(num_classes, false);
    for (VertexId u : train_ids)
      for (int c : labels.labels[u]) present[c] = true;
    if (!std::all_of(present.begin(), present.end(), [](bool b) { return b; }))
      continue;

    const std::uint32_t d = z.dim();
    FeatureMatrix train(train_ids.size(), d);
    for (std::size_t i = 0; i < train_ids.size(); ++i) {
      const auto row = z.row(train_ids[i]);
      std::copy(row.begin(), row.end(), train.row(i).begin());
    }

    // one-vs-rest
    std::vector<LogRegModel> models(num_classes);
    for (int c = 0; c < num_classes; ++c) {
      std::vector<int> targets(train_ids.size());
      for (std::size_t i = 0; i < train_ids.size(); ++i) {
        const auto& ls = labels.labels[train_ids[i]];
        targets[i] = std::binary_search(ls.begin(), ls.end(), c) ? 1 : 0;
      }
      models[c] = fit_logreg(train, targets, cfg);
    }

    std::vector<ClassCounts> counts(num_classes);
    std::vector<std::pair<double, int>> ranked(num_classes);
    for (VertexId u : test_ids) {
      const auto x = z.row(u);
      for (int c = 0; c < num_classes; ++c)
        ranked[c] = {models[c].probability(x), c};
      const auto& truth = labels.labels[u];
      std::vector<int> predicted;
      if (labels.multi_label) {
        // top-l with l = true label count
        std::partial_sort(ranked.begin(), ranked.begin() + truth.size(),
                          ranked.end(), std::greater<>());
        for (std::size_t i = 0; i < truth.size(); ++i)
          predicted.push_back(ranked[i].second);
      } else {
        predicted.push_back(
            std::max_element(ranked.begin(), ranked.end())->second);
      }
      std::sort(predicted.begin(), predicted.end());
      for (int c : predicted) {
        if (std::binary_search(truth.begin(), truth.end(), c))
          ++counts[c].tp;
        else
          ++counts[c].fp;
      }
      for (int c : truth)
        if (!std::binary_search(predicted.begin(), predicted.end(), c))
          ++counts[c].fn;
    }
    return f1_from_counts(counts);
  }
  throw Error("node_classification: a class was absent from training in 10 splits");
}

namespace {

double sq_distance(std::span<const float> x, const std::vector<double>& centroid,
                   std::size_t offset, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = double(x[j]) - centroid[offset + j];
    s += diff * diff;
  }
  return s;
}

struct KmeansRun {
  std::vector<int> assignment;
  double inertia = std::numeric_limits<double>::infinity();
};

KmeansRun lloyd_once(const EmbeddingMatrix& z, int k, Rng& rng, int max_iters) {
  const std::size_t n = z.rows();
  const std::size_t d = z.dim();
  std::vector<double> centroids(std::size_t(k) * d);

  // k-means++ seeding
  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  {
    const auto first = static_cast<std::size_t>(rng.below(n));
    for (std::size_t j = 0; j < d; ++j) centroids[j] = z.row(first)[j];
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d2 = sq_distance(z.row(i), centroids, (c - 1) * d, d);
        dist2[i] = std::min(dist2[i], d2);
        total += dist2[i];
      }
      std::size_t chosen = 0;
      if (total > 0) {
        double target = rng.uniform() * total;
        for (std::size_t i = 0; i < n; ++i) {
          target -= dist2[i];
          if (target <= 0) { chosen = i; break; }
        }
      } else {
        chosen = static_cast<std::size_t>(rng.below(n));
      }
      for (std::size_t j = 0; j < d; ++j)
        centroids[std::size_t(c) * d + j] = z.row(chosen)[j];
    }
  }

  KmeansRun run;
  run.assignment.assign(n, -1);
  std::vector<double> sums(std::size_t(k) * d);
  std::vector<std::size_t> sizes(k);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d2 = sq_distance(z.row(i), centroids, std::size_t(c) * d, d);
        if (d2 < best_d2) { best_d2 = d2; best = c; }
      }
      if (run.assignment[i] != best) { run.assignment[i] = best; changed = true; }
      inertia += best_d2;
    }
    run.inertia = inertia;
    if (!changed && it > 0) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int c = run.assignment[i];
      ++sizes[c];
      const auto row = z.row(i);
      for (std::size_t j = 0; j < d; ++j) sums[std::size_t(c) * d + j] += row[j];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        for (std::size_t j = 0; j < d; ++j)
          centroids[std::size_t(c) * d + j] = sums[std::size_t(c) * d + j] / sizes[c];
      } else {
        // re-seed at the point farthest from its current centroid
        std::size_t farthest = 0;
        double best_d2 = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d2 = sq_distance(
              z.row(i), centroids, std::size_t(run.assignment[i]) * d, d);
          if (d2 > best_d2) { best_d2 = d2; farthest = i; }
        }
        for (std::size_t j = 0; j < d; ++j)
          centroids[std::size_t(c) * d + j] = z.row(farthest)[j];
      }
    }
  }
  return run;
}

}  // namespace

Clustering kmeans(const EmbeddingMatrix& z, int k, Rng& rng, int restarts,
                  int max_iters) {
  if (k < 1 || static_cast<VertexId>(k) > z.rows())
    throw UsageError("kmeans: k must be in [1, n]");
  KmeansRun best;
  for (int r = 0; r < restarts; ++r) {
    KmeansRun run = lloyd_once(z, k, rng, max_iters);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return Clustering{std::move(best.assignment), k};
}

double kmeans_inertia(const EmbeddingMatrix& z, const Clustering& c) {
  const std::size_t n = z.rows();
  const std::size_t d = z.dim();
  std::vector<double> sums(std::size_t(c.k) * d);
  std::vector<std::size_t> sizes(c.k);
  for (std::size_t i = 0; i < n; ++i) {
    ++sizes[c.assignment[i]];
    const auto row = z.row(i);
    for (std::size_t j = 0; j < d; ++j)
      sums[std::size_t(c.assignment[i]) * d + j] += row[j];
  }
  for (int cl = 0; cl < c.k; ++cl)
    if (sizes[cl] > 0)
      for (std::size_t j = 0; j < d; ++j) sums[std::size_t(cl) * d + j] /= sizes[cl];
  double inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    inertia += sq_distance(z.row(i), sums, std::size_t(c.assignment[i]) * d, d);
  return inertia;
}

double modularity(const CsrGraph& g, const Clustering& c) {
  const VertexId n = g.num_vertices();
  if (c.assignment.size() != n)
    throw RangeError("modularity: assignment must cover all vertices");
  if (g.num_edges() == 0) throw UsageError("modularity undefined for m = 0");
  const double m = double(g.num_edges()) / 2.0;  // undirected edge count

  std::vector<std::uint64_t> intra_arcs(c.k, 0);
  std::vector<std::uint64_t> cluster_degree(c.k, 0);
  for (VertexId u = 0; u < n; ++u) {
    const int cu = c.assignment[u];
    cluster_degree[cu] += g.degree(u);
    for (VertexId v : g.neighbors(u))
      if (c.assignment[v] == cu) ++intra_arcs[cu];
  }
  double q = 0.0;
  for (int cl = 0; cl < c.k; ++cl) {
    const double l_c = double(intra_arcs[cl]) / 2.0;
    const double d_c = double(cluster_degree[cl]);
    q += l_c / m - (d_c / (2.0 * m)) * (d_c / (2.0 * m));
  }
  return q;
}

SweepResult best_modularity_sweep(const CsrGraph& g, const EmbeddingMatrix& z,
                                  Rng& rng, int kmax) {
  const int upper = std::min<int>(kmax, static_cast<int>(z.rows()));
  if (upper < 2) throw UsageError("best_modularity_sweep needs n >= 2");
  SweepResult best{0, -std::numeric_limits<double>::infinity()};
  for (int k = 2; k <= upper; ++k) {
    const Clustering c = kmeans(z, k, rng);
    const double q = modularity(g, c);
    if (q > best.q) best = {k, q};
  }
  return best;
}

}  // namespace force2vec
