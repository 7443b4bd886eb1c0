#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>

#include "force2vec/errors.hpp"

namespace force2vec {

enum class ForceKind { Sigmoid, TDist, FruchtermanReingold, ForceAtlas, LinLog };

ForceKind parse_force_kind(const std::string& name);  // sigmoid|tdist|fr|fa|linlog
const char* force_kind_name(ForceKind kind);

struct ForceModel {
  ForceKind kind = ForceKind::Sigmoid;
  float epsilon = 1e-6f;                     // singularity clamp
  std::optional<float> repulsion_cap = 5.0f; // max repulsive gradient magnitude
};

/// Overflow-safe logistic function; exact 0.5 at x=0, saturates cleanly
/// for |x| beyond ~40.
inline double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Per-pair gradient kernels. Each writes the contribution to grad f(u)
// into `out` (overwriting). All are pure; scalar work is done in double,
// outputs are stored single-precision. Sign convention throughout: the
// SGD step z_u -= eta * grad moves u toward attractive partners and away
// from repulsive ones.

/// (sigma(<z_u, z_v>) - 1) * z_v
void attractive_grad_sigmoid(std::span<const float> z_u,
                             std::span<const float> z_v, std::span<float> out);

/// sigma(<z_u, z_w>) * z_w, magnitude-clamped by repulsion_cap.
void repulsive_grad_sigmoid(const ForceModel& model, std::span<const float> z_u,
                            std::span<const float> z_w, std::span<float> out);

/// (2t / (1 + t^2)) * unit(z_u - z_v), t = ||z_u - z_v||.
void attractive_grad_tdist(const ForceModel& model, std::span<const float> z_u,
                           std::span<const float> z_v, std::span<float> out);

/// (-2 / (t (1 + t^2))) * unit(z_u - z_w), t clamped below by epsilon,
/// magnitude clamped by repulsion_cap. Coincident points get a fixed
/// fallback direction so the clamped magnitude is still applied.
void repulsive_grad_tdist(const ForceModel& model, std::span<const float> z_u,
                          std::span<const float> z_w, std::span<float> out);

/// Distance-based spring-electrical kernels (FR / ForceAtlas / LinLog).
/// Attractive scalars: r^2 (FR), r (FA), log(1+r) (LL); repulsive scalar
/// -1/max(r, epsilon) for all three; result = scalar * unit(z_u - z_other).
void pair_grad_table2(const ForceModel& model, std::span<const float> z_u,
                      std::span<const float> z_other, bool attractive,
                      std::span<float> out);

/// Dispatch over all five kinds.
void pair_grad(const ForceModel& model, std::span<const float> z_u,
               std::span<const float> z_other, bool attractive,
               std::span<float> out);

/// Same dispatch with double-precision output, used where per-pair terms
/// are accumulated before any rounding to storage precision.
void pair_grad(const ForceModel& model, std::span<const float> z_u,
               std::span<const float> z_other, bool attractive,
               std::span<double> out);

/// Per-pair loss term, defined for Sigmoid and TDist only (monitoring).
/// Sigmoid: log(1+e^-x) attractive, log(1+e^x) repulsive, x = <z_u, z_v>.
/// TDist:   log(1+t^2) attractive, -log(t^2/(1+t^2)) repulsive.
double pair_loss(const ForceModel& model, std::span<const float> z_u,
                 std::span<const float> z_v, bool attractive);

}  // namespace force2vec
