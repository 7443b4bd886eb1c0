#include "force2vec/force_kernels.hpp"

#include <cassert>
#include <cmath>

namespace force2vec {

ForceKind parse_force_kind(const std::string& name) {
  if (name == "sigmoid") return ForceKind::Sigmoid;
  if (name == "tdist") return ForceKind::TDist;
  if (name == "fr") return ForceKind::FruchtermanReingold;
  if (name == "fa" || name == "forceatlas") return ForceKind::ForceAtlas;
  if (name == "linlog") return ForceKind::LinLog;
  throw UsageError("unknown force model \"" + name + "\"");
}

const char* force_kind_name(ForceKind kind) {
  switch (kind) {
    case ForceKind::Sigmoid: return "sigmoid";
    case ForceKind::TDist: return "tdist";
    case ForceKind::FruchtermanReingold: return "fr";
    case ForceKind::ForceAtlas: return "fa";
    case ForceKind::LinLog: return "linlog";
  }
  return "?";
}

namespace {

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += double(a[i]) * double(b[i]);
  return s;
}

double distance(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = double(a[i]) - double(b[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

template <typename T>
void scale_into(double c, std::span<const float> v, std::span<T> out) {
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = static_cast<T>(c * double(v[i]));
}

// out = scalar * (z_u - z_other) / max(t, eps). When the points coincide
// the direction is undefined; a fixed first-axis fallback keeps the
// clamped magnitude instead of silently returning zero.
template <typename T>
void scaled_unit_diff(double scalar, std::span<const float> z_u,
                      std::span<const float> z_other, double t, double eps,
                      std::span<T> out) {
  if (t < eps) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = T(0);
    if (!out.empty()) out[0] = static_cast<T>(scalar);
    return;
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<T>(scalar * (double(z_u[i]) - double(z_other[i])) / t);
}

// Rescale so that ||out|| <= cap. `magnitude` is the analytic norm of the
// unclamped result.
template <typename T>
void clamp_magnitude(const ForceModel& model, double magnitude,
                     std::span<T> out) {
  if (!model.repulsion_cap) return;
  const double cap = *model.repulsion_cap;
  if (magnitude <= cap || magnitude == 0.0) return;
  const double scale = cap / magnitude;
  for (T& x : out) x = static_cast<T>(double(x) * scale);
}

template <typename T>
void attractive_grad_sigmoid_impl(std::span<const float> z_u,
                                  std::span<const float> z_v,
                                  std::span<T> out) {
  assert(z_u.size() == z_v.size() && z_u.size() == out.size());
  const double coef = stable_sigmoid(dot(z_u, z_v)) - 1.0;
  scale_into(coef, z_v, out);
}

template <typename T>
void repulsive_grad_sigmoid_impl(const ForceModel& model,
                                 std::span<const float> z_u,
                                 std::span<const float> z_w, std::span<T> out) {
  assert(z_u.size() == z_w.size() && z_u.size() == out.size());
  const double coef = stable_sigmoid(dot(z_u, z_w));
  scale_into(coef, z_w, out);
  const double norm_w = std::sqrt(dot(z_w, z_w));
  clamp_magnitude(model, coef * norm_w, out);
}

template <typename T>
void attractive_grad_tdist_impl(const ForceModel& model,
                                std::span<const float> z_u,
                                std::span<const float> z_v, std::span<T> out) {
  assert(z_u.size() == z_v.size() && z_u.size() == out.size());
  const double t = distance(z_u, z_v);
  const double scalar = 2.0 * t / (1.0 + t * t);  // -> 0 as t -> 0
  scaled_unit_diff(scalar, z_u, z_v, t, model.epsilon, out);
}

template <typename T>
void repulsive_grad_tdist_impl(const ForceModel& model,
                               std::span<const float> z_u,
                               std::span<const float> z_w, std::span<T> out) {
  assert(z_u.size() == z_w.size() && z_u.size() == out.size());
  const double t_raw = distance(z_u, z_w);
  const double t = std::max(t_raw, double(model.epsilon));
  const double scalar = -2.0 / (t * (1.0 + t * t));
  scaled_unit_diff(scalar, z_u, z_w, t_raw, model.epsilon, out);
  clamp_magnitude(model, std::abs(scalar), out);
}

template <typename T>
void pair_grad_table2_impl(const ForceModel& model, std::span<const float> z_u,
                           std::span<const float> z_other, bool attractive,
                           std::span<T> out) {
  assert(z_u.size() == z_other.size() && z_u.size() == out.size());
  const double r_raw = distance(z_u, z_other);
  double scalar;
  if (attractive) {
    switch (model.kind) {
      case ForceKind::FruchtermanReingold: scalar = r_raw * r_raw; break;
      case ForceKind::ForceAtlas: scalar = r_raw; break;
      case ForceKind::LinLog: scalar = std::log1p(r_raw); break;
      default: throw UnsupportedError("pair_grad_table2: unsupported model");
    }
    scaled_unit_diff(scalar, z_u, z_other, r_raw, model.epsilon, out);
    return;
  }
  switch (model.kind) {
    case ForceKind::FruchtermanReingold:
    case ForceKind::ForceAtlas:
    case ForceKind::LinLog: break;
    default: throw UnsupportedError("pair_grad_table2: unsupported model");
  }
  scalar = -1.0 / std::max(r_raw, double(model.epsilon));
  scaled_unit_diff(scalar, z_u, z_other, r_raw, model.epsilon, out);
  clamp_magnitude(model, std::abs(scalar), out);
}

template <typename T>
void pair_grad_impl(const ForceModel& model, std::span<const float> z_u,
                    std::span<const float> z_other, bool attractive,
                    std::span<T> out) {
  switch (model.kind) {
    case ForceKind::Sigmoid:
      if (attractive)
        attractive_grad_sigmoid_impl(z_u, z_other, out);
      else
        repulsive_grad_sigmoid_impl(model, z_u, z_other, out);
      return;
    case ForceKind::TDist:
      if (attractive)
        attractive_grad_tdist_impl(model, z_u, z_other, out);
      else
        repulsive_grad_tdist_impl(model, z_u, z_other, out);
      return;
    default:
      pair_grad_table2_impl(model, z_u, z_other, attractive, out);
  }
}

}  // namespace

void attractive_grad_sigmoid(std::span<const float> z_u,
                             std::span<const float> z_v, std::span<float> out) {
  attractive_grad_sigmoid_impl(z_u, z_v, out);
}

void repulsive_grad_sigmoid(const ForceModel& model, std::span<const float> z_u,
                            std::span<const float> z_w, std::span<float> out) {
  repulsive_grad_sigmoid_impl(model, z_u, z_w, out);
}

void attractive_grad_tdist(const ForceModel& model, std::span<const float> z_u,
                           std::span<const float> z_v, std::span<float> out) {
  attractive_grad_tdist_impl(model, z_u, z_v, out);
}

void repulsive_grad_tdist(const ForceModel& model, std::span<const float> z_u,
                          std::span<const float> z_w, std::span<float> out) {
  repulsive_grad_tdist_impl(model, z_u, z_w, out);
}

void pair_grad_table2(const ForceModel& model, std::span<const float> z_u,
                      std::span<const float> z_other, bool attractive,
                      std::span<float> out) {
  pair_grad_table2_impl(model, z_u, z_other, attractive, out);
}

void pair_grad(const ForceModel& model, std::span<const float> z_u,
               std::span<const float> z_other, bool attractive,
               std::span<float> out) {
  pair_grad_impl(model, z_u, z_other, attractive, out);
}

void pair_grad(const ForceModel& model, std::span<const float> z_u,
               std::span<const float> z_other, bool attractive,
               std::span<double> out) {
  pair_grad_impl(model, z_u, z_other, attractive, out);
}

double pair_loss(const ForceModel& model, std::span<const float> z_u,
                 std::span<const float> z_v, bool attractive) {
  switch (model.kind) {
    case ForceKind::Sigmoid: {
      const double x = dot(z_u, z_v);
      if (attractive)  // log(1 + e^-x)
        return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
      // -log(e^-x / (1 + e^-x)) = log(1 + e^x)
      return x >= 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    }
    case ForceKind::TDist: {
      const double t = distance(z_u, z_v);
      const double t2 = t * t;
      if (attractive) return std::log1p(t2);
      const double tc = std::max(t2, double(model.epsilon) * double(model.epsilon));
      return -std::log(tc / (1.0 + tc));
    }
    default:
      throw UnsupportedError("pair_loss is defined for sigmoid and tdist only");
  }
}

}  // namespace force2vec
