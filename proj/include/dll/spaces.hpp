#pragma once

// Conversions between the four prediction targets and the latent
// z_t = alpha_t x + sigma_t eps. Under the variance-preserving schedule the
// angular parameterization collapses to cos(phi_t) = alpha_t and
// sin(phi_t) = sigma_t, so every identity here is written directly in terms
// of alpha and sigma.

#include <span>
#include <vector>

#include "dll/schedule.hpp"
#include "dll/target_space.hpp"

namespace dll {

using Vec = std::vector<double>;

struct Prediction {
  TargetSpace space;
  Vec value;
};

namespace detail {
inline void check_dims(std::span<const double> a, std::span<const double> b, const char* op) {
  if (a.size() != b.size()) throw DimensionError(std::string(op) + ": dimension mismatch");
}
}  // namespace detail

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  detail::check_dims(a, b, "squared_distance");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// z = alpha_t x + sigma_t eps
inline void noisify(std::span<const double> x, std::span<const double> eps, TimePoint t,
                    std::span<double> out) {
  detail::check_dims(x, eps, "noisify");
  detail::check_dims(x, out, "noisify");
  const auto [a, s] = alpha_sigma(t);
  for (size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + s * eps[i];
}

// v = alpha_t eps - sigma_t x
inline void v_target(std::span<const double> x, std::span<const double> eps, TimePoint t,
                     std::span<double> out) {
  detail::check_dims(x, eps, "v_target");
  detail::check_dims(x, out, "v_target");
  const auto [a, s] = alpha_sigma(t);
  for (size_t i = 0; i < x.size(); ++i) out[i] = a * eps[i] - s * x[i];
}

// s = -(z - alpha_t x) / sigma_t^2; equals -eps/sigma_t when z = noisify(x,eps,t)
inline void score_target(std::span<const double> x, std::span<const double> z, TimePoint t,
                         std::span<double> out) {
  detail::check_dims(x, z, "score_target");
  detail::check_dims(x, out, "score_target");
  const auto [a, s] = alpha_sigma(t);
  if (s == 0.0) throw DivergenceError("score_target: sigma_t = 0 at t=0");
  const double inv_s2 = 1.0 / (s * s);
  for (size_t i = 0; i < x.size(); ++i) out[i] = -(z[i] - a * x[i]) * inv_s2;
}

// x = (z - sigma_t eps_hat) / alpha_t; diverges as alpha_t -> 0
inline void x_from_eps(std::span<const double> z, std::span<const double> eps_hat, TimePoint t,
                       std::span<double> out) {
  detail::check_dims(z, eps_hat, "x_from_eps");
  detail::check_dims(z, out, "x_from_eps");
  const auto [a, s] = alpha_sigma(t);
  if (a == 0.0) throw DivergenceError("x_from_eps: alpha_t = 0 at t=1");
  const double inv_a = 1.0 / a;
  for (size_t i = 0; i < z.size(); ++i) out[i] = (z[i] - s * eps_hat[i]) * inv_a;
}

// x = alpha_t z - sigma_t v_hat (well defined on the whole interval)
inline void x_from_v(std::span<const double> z, std::span<const double> v_hat, TimePoint t,
                     std::span<double> out) {
  detail::check_dims(z, v_hat, "x_from_v");
  detail::check_dims(z, out, "x_from_v");
  const auto [a, s] = alpha_sigma(t);
  for (size_t i = 0; i < z.size(); ++i) out[i] = a * z[i] - s * v_hat[i];
}

// Tweedie: x = (z + sigma_t^2 s_hat) / alpha_t
inline void x_from_score(std::span<const double> z, std::span<const double> s_hat, TimePoint t,
                         std::span<double> out) {
  detail::check_dims(z, s_hat, "x_from_score");
  detail::check_dims(z, out, "x_from_score");
  const auto [a, s] = alpha_sigma(t);
  if (a == 0.0) throw DivergenceError("x_from_score: alpha_t = 0 at t=1");
  const double inv_a = 1.0 / a;
  const double s2 = s * s;
  for (size_t i = 0; i < z.size(); ++i) out[i] = (z[i] + s2 * s_hat[i]) * inv_a;
}

// eps implied by a data prediction: eps = (z - alpha_t x_hat) / sigma_t
inline void eps_from_x(std::span<const double> z, std::span<const double> x_hat, TimePoint t,
                       std::span<double> out) {
  detail::check_dims(z, x_hat, "eps_from_x");
  detail::check_dims(z, out, "eps_from_x");
  const auto [a, s] = alpha_sigma(t);
  if (s == 0.0) throw DivergenceError("eps_from_x: sigma_t = 0 at t=0");
  const double inv_s = 1.0 / s;
  for (size_t i = 0; i < z.size(); ++i) out[i] = (z[i] - a * x_hat[i]) * inv_s;
}

// Dispatch: the implied x_hat for a prediction in any space.
inline void to_x_prediction(const Prediction& pred, std::span<const double> z, TimePoint t,
                            std::span<double> out) {
  switch (pred.space) {
    case TargetSpace::X:
      detail::check_dims(pred.value, out, "to_x_prediction");
      for (size_t i = 0; i < out.size(); ++i) out[i] = pred.value[i];
      return;
    case TargetSpace::Eps: x_from_eps(z, pred.value, t, out); return;
    case TargetSpace::V: x_from_v(z, pred.value, t, out); return;
    case TargetSpace::S: x_from_score(z, pred.value, t, out); return;
  }
  throw RangeError("to_x_prediction: bad space");
}

// Allocating conveniences.
inline Vec noisify(const Vec& x, const Vec& eps, TimePoint t) {
  Vec out(x.size());
  noisify(x, eps, t, out);
  return out;
}
inline Vec v_target(const Vec& x, const Vec& eps, TimePoint t) {
  Vec out(x.size());
  v_target(x, eps, t, out);
  return out;
}
inline Vec score_target(const Vec& x, const Vec& z, TimePoint t) {
  Vec out(x.size());
  score_target(x, z, t, out);
  return out;
}
inline Vec to_x_prediction(const Prediction& pred, const Vec& z, TimePoint t) {
  Vec out(z.size());
  to_x_prediction(pred, z, t, out);
  return out;
}

// The target in `space` for data x with noise eps at time t (z = noisify(x,eps,t)).
inline void make_target(TargetSpace space, std::span<const double> x, std::span<const double> eps,
                        std::span<const double> z, TimePoint t, std::span<double> out) {
  switch (space) {
    case TargetSpace::X:
      for (size_t i = 0; i < out.size(); ++i) out[i] = x[i];
      return;
    case TargetSpace::Eps:
      for (size_t i = 0; i < out.size(); ++i) out[i] = eps[i];
      return;
    case TargetSpace::V: v_target(x, eps, t, out); return;
    case TargetSpace::S: score_target(x, z, t, out); return;
  }
  throw RangeError("make_target: bad space");
}

}  // namespace dll
