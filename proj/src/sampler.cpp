#include "dll/sampler.hpp"

#include <cmath>

#include "dll/forward.hpp"
#include "dll/rng.hpp"

namespace dll {

std::vector<std::pair<double, double>> step_grid(int num_steps) {
  if (num_steps < 1) throw RangeError("step_grid: num_steps must be >= 1");
  std::vector<std::pair<double, double>> grid;
  grid.reserve(num_steps);
  const double inv = 1.0 / num_steps;
  for (int i = num_steps; i >= 1; --i) grid.emplace_back((i - 1) * inv, i * inv);
  return grid;
}

namespace {

// x_hat over a batch that shares one time point.
void batch_to_x(TargetSpace space, const double* z, const double* pred, double t, size_t n,
                size_t d, double* out) {
  const TimePoint tp(t);
  for (size_t i = 0; i < n; ++i) {
    const std::span zi(z + i * d, d);
    const std::span pi(pred + i * d, d);
    const std::span oi(out + i * d, d);
    switch (space) {
      case TargetSpace::X:
        for (size_t dd = 0; dd < d; ++dd) oi[dd] = pi[dd];
        break;
      case TargetSpace::Eps: x_from_eps(zi, pi, tp, oi); break;
      case TargetSpace::V: x_from_v(zi, pi, tp, oi); break;
      case TargetSpace::S: x_from_score(zi, pi, tp, oi); break;
    }
  }
}

}  // namespace

PointCloud sample(const Predictor& model, const SampleConfig& cfg) {
  cfg.validate();
  const size_t n = cfg.num_samples;
  const size_t d = static_cast<size_t>(model.data_dim());
  const int N = cfg.num_steps;

  std::vector<double> z(n * d), pred(n * d), x_hat(n * d), ts(n);
  for (size_t i = 0; i < n * d; ++i)
    z[i] = rng::normal(cfg.seed, Stream::SampleInit, i);

  for (int i = N; i >= 1; --i) {
    const double t_pred = (i == N) ? 1.0 - 0.5 / N : static_cast<double>(i) / N;
    for (size_t c = 0; c < n; ++c) ts[c] = t_pred;
    model.predict(z.data(), ts.data(), n, pred.data());
    batch_to_x(model.space(), z.data(), pred.data(), t_pred, n, d, x_hat.data());
    if (cfg.clip) {
      for (double& v : x_hat) v = std::min(std::max(v, cfg.clip->first), cfg.clip->second);
    }
    if (i == 1) break;  // final step: the data estimate is the output

    const double s = static_cast<double>(i - 1) / N;
    const double t_post = (i == N) ? 1.0 : static_cast<double>(i) / N;
    const auto [as, ss] = alpha_sigma(TimePoint(s));
    const double st = alpha_sigma(TimePoint(t_post)).second;
    const auto [alpha_ts, sigma2_ts] = transition_coeffs(TimePoint(s), TimePoint(t_post));
    const double st2 = st * st;
    const double cz = alpha_ts * (ss * ss) / st2;
    const double cx = as * sigma2_ts / st2;
    const double post_std = std::sqrt(sigma2_ts * (ss * ss) / st2);

    const uint64_t noise_base = static_cast<uint64_t>(N - i) * n * d;
    for (size_t c = 0; c < n; ++c)
      for (size_t dd = 0; dd < d; ++dd) {
        const size_t idx = c * d + dd;
        const double noise = rng::normal(cfg.seed, Stream::SampleNoise, noise_base + idx);
        z[idx] = cz * z[idx] + cx * x_hat[idx] + post_std * noise;
      }
  }

  PointCloud out;
  out.n = n;
  out.pts = std::move(x_hat);
  out.seed = cfg.seed;
  out.normalized = false;
  return out;
}

}  // namespace dll
