#pragma once

// Forward-process sampling, the closed-form posterior q(z_s | z_t, x), and the
// transition KL between posteriors parameterized by x and x_hat.

#include <span>
#include <utility>
#include <vector>

#include "dll/rng.hpp"
#include "dll/schedule.hpp"
#include "dll/spaces.hpp"

namespace dll {

// Isotropic Gaussian: per-dimension variance `var` around `mean`.
struct GaussianParams {
  Vec mean;
  double var = 0.0;
};

struct ComposeStats {
  Vec mean;  // empirical mean per dimension
  Vec var;   // empirical (unbiased) variance per dimension
  size_t n = 0;
};

// Draw z ~ q(z_t | x) = N(alpha_t x, sigma_t^2 I); returns (z, eps) so the
// caller can form any target from the same draw.
inline std::pair<Vec, Vec> sample_marginal(std::span<const double> x, TimePoint t, RngState& rng) {
  const size_t d = x.size();
  Vec eps(d), z(d);
  for (size_t i = 0; i < d; ++i) eps[i] = rng.next_normal();
  noisify(x, eps, t, z);
  return {std::move(z), std::move(eps)};
}

// q(z_s | z_t, x) with 0 < s < t <= 1:
//   mu_Q  = alpha_{t|s} (sigma_s^2/sigma_t^2) z_t + alpha_s (sigma^2_{t|s}/sigma_t^2) x
//   var_Q = sigma^2_{t|s} sigma_s^2 / sigma_t^2
inline GaussianParams posterior_params(std::span<const double> z_t, std::span<const double> x,
                                       TimePoint s, TimePoint t) {
  if (!(s.value() < t.value())) throw OrderingError("posterior_params: requires s < t");
  if (s.value() <= 0.0) throw DivergenceError("posterior_params: requires s > 0");
  detail::check_dims(z_t, x, "posterior_params");
  const auto [as, ss] = alpha_sigma(s);
  const auto [at, st] = alpha_sigma(t);
  const auto [alpha_ts, sigma2_ts] = transition_coeffs(s, t);
  const double st2 = st * st;
  const double cz = alpha_ts * (ss * ss) / st2;
  const double cx = as * sigma2_ts / st2;
  GaussianParams out;
  out.mean.resize(z_t.size());
  for (size_t i = 0; i < z_t.size(); ++i) out.mean[i] = cz * z_t[i] + cx * x[i];
  out.var = sigma2_ts * (ss * ss) / st2;
  return out;
}

// KL between the two posteriors q(z_s|z_t, x) and q(z_s|z_t, x_hat); the
// shared variance collapses it to (1/2)(SNR(s) - SNR(t)) ||x - x_hat||^2.
inline double kl_transition(std::span<const double> x, std::span<const double> x_hat, TimePoint s,
                            TimePoint t) {
  if (!(s.value() < t.value())) throw OrderingError("kl_transition: requires s < t");
  if (s.value() == 0.0) throw DivergenceError("kl_transition: SNR(0) diverges");
  return 0.5 * (snr(s) - snr(t)) * squared_distance(x, x_hat);
}

// Sample z_s ~ q(z_s|x) then z_t ~ q(z_t|z_s) n times; the empirical moments
// must match the one-step marginal q(z_t|x).
inline ComposeStats compose_check(std::span<const double> x, TimePoint s, TimePoint t,
                                  RngState& rng, size_t n) {
  if (!(s.value() <= t.value())) throw OrderingError("compose_check: requires s <= t");
  if (s.value() <= 0.0) throw DivergenceError("compose_check: requires s > 0");
  const size_t d = x.size();
  const auto [as, ss] = alpha_sigma(s);
  const auto [alpha_ts, sigma2_ts] = transition_coeffs(s, t);
  const double sigma_ts = std::sqrt(sigma2_ts);

  Vec sum(d, 0.0), sum_sq(d, 0.0);
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < d; ++i) {
      const double zs = as * x[i] + ss * rng.next_normal();
      const double zt = alpha_ts * zs + sigma_ts * rng.next_normal();
      sum[i] += zt;
      sum_sq[i] += zt * zt;
    }
  }
  ComposeStats out;
  out.n = n;
  out.mean.resize(d);
  out.var.resize(d);
  for (size_t i = 0; i < d; ++i) {
    out.mean[i] = sum[i] / static_cast<double>(n);
    out.var[i] = (sum_sq[i] - static_cast<double>(n) * out.mean[i] * out.mean[i]) /
                 static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace dll
