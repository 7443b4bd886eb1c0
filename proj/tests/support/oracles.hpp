#pragma once

// Independent double-precision reference implementations used as oracles.
// These deliberately do not call the library kernels.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "force2vec/force_kernels.hpp"
#include "force2vec/sampling.hpp"

namespace f2v_test {

using force2vec::ForceKind;
using force2vec::ForceModel;
using force2vec::VertexId;

using Vec = std::vector<double>;

inline Vec to_vec(std::span<const float> x) { return Vec(x.begin(), x.end()); }

inline double ref_dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double ref_dist(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Per-pair loss terms written straight from the formulas.
inline double ref_loss_sigmoid_attractive(const Vec& zu, const Vec& zv) {
  return std::log(1.0 + std::exp(-ref_dot(zu, zv)));
}
inline double ref_loss_sigmoid_repulsive(const Vec& zu, const Vec& zw) {
  const double x = ref_dot(zu, zw);
  return -std::log(std::exp(-x) / (1.0 + std::exp(-x)));
}
inline double ref_loss_tdist_attractive(const Vec& zu, const Vec& zv) {
  const double t = ref_dist(zu, zv);
  return std::log(1.0 + t * t);
}
inline double ref_loss_tdist_repulsive(const Vec& zu, const Vec& zw) {
  const double t = ref_dist(zu, zw);
  return -std::log(t * t / (1.0 + t * t));
}

/// Central finite difference of `loss` with respect to its first argument.
inline Vec finite_difference(const std::function<double(const Vec&)>& loss,
                             const Vec& zu, double h = 1e-5) {
  Vec grad(zu.size());
  Vec probe = zu;
  for (std::size_t j = 0; j < zu.size(); ++j) {
    probe[j] = zu[j] + h;
    const double hi = loss(probe);
    probe[j] = zu[j] - h;
    const double lo = loss(probe);
    probe[j] = zu[j];
    grad[j] = (hi - lo) / (2.0 * h);
  }
  return grad;
}

/// Per-pair gradient reference for all five models, sign convention: the
/// update z_u -= eta*grad attracts context vertices and repels negatives.
inline Vec ref_pair_grad(const ForceModel& model, const Vec& zu, const Vec& zo,
                         bool attractive) {
  const std::size_t d = zu.size();
  Vec out(d, 0.0);
  const double eps = model.epsilon;
  const double cap =
      model.repulsion_cap ? double(*model.repulsion_cap) : INFINITY;

  if (model.kind == ForceKind::Sigmoid) {
    const double x = ref_dot(zu, zo);
    const double sig = 1.0 / (1.0 + std::exp(-std::min(std::max(x, -500.0), 500.0)));
    const double coef = attractive ? sig - 1.0 : sig;
    for (std::size_t j = 0; j < d; ++j) out[j] = coef * zo[j];
    if (!attractive) {
      double norm = std::sqrt(ref_dot(out, out));
      if (norm > cap)
        for (auto& v : out) v *= cap / norm;
    }
    return out;
  }

  const double r_raw = ref_dist(zu, zo);
  double scalar;
  switch (model.kind) {
    case ForceKind::TDist:
      scalar = attractive ? 2.0 * r_raw / (1.0 + r_raw * r_raw)
                          : -2.0 / (std::max(r_raw, eps) *
                                    (1.0 + std::max(r_raw, eps) *
                                               std::max(r_raw, eps)));
      break;
    case ForceKind::FruchtermanReingold:
      scalar = attractive ? r_raw * r_raw : -1.0 / std::max(r_raw, eps);
      break;
    case ForceKind::ForceAtlas:
      scalar = attractive ? r_raw : -1.0 / std::max(r_raw, eps);
      break;
    case ForceKind::LinLog:
      scalar = attractive ? std::log(1.0 + r_raw) : -1.0 / std::max(r_raw, eps);
      break;
    default:
      return out;
  }
  if (r_raw < eps) {
    out[0] = scalar;  // fallback direction for coincident points
  } else {
    for (std::size_t j = 0; j < d; ++j) out[j] = scalar * (zu[j] - zo[j]) / r_raw;
  }
  if (!attractive) {
    const double mag = std::abs(scalar);
    if (mag > cap)
      for (auto& v : out) v *= cap / mag;
  }
  return out;
}

/// Unbatched reference for one vertex's minibatch gradient.
inline Vec ref_vertex_grad(const ForceModel& model, const Vec& zu,
                           const std::vector<Vec>& context,
                           const std::vector<Vec>& negatives) {
  Vec total(zu.size(), 0.0);
  for (const Vec& zv : context) {
    const Vec g = ref_pair_grad(model, zu, zv, true);
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += g[j];
  }
  for (const Vec& zw : negatives) {
    const Vec g = ref_pair_grad(model, zu, zw, false);
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += g[j];
  }
  return total;
}

}  // namespace f2v_test
