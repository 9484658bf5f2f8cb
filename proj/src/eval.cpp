#include "dll/eval.hpp"

#include <cmath>

#include "dll/rng.hpp"

namespace dll {
namespace {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

constexpr size_t kChunk = 8192;

// Shared driver: walks every (point, draw) pair in chunks, batches the model
// evaluation, and hands each draw's (t, coefficient-free squared error) pair
// to the sink.
template <typename Sink>
void for_each_draw(const Predictor& model, const PointCloud& cloud, int draws_per_point,
                   uint64_t seed, double t_min, Sink&& sink) {
  if (!(t_min > 0.0 && t_min < 0.5)) throw RangeError("eval: t_min must lie in (0, 0.5)");
  if (draws_per_point < 1) throw RangeError("eval: draws_per_point must be >= 1");
  const size_t d = static_cast<size_t>(model.data_dim());
  const size_t K = static_cast<size_t>(draws_per_point);
  const size_t total = cloud.n * K;
  const double lo = t_min;
  const double width = (1.0 - 2.0 * t_min) / static_cast<double>(K);
  const TargetSpace space = model.space();

  std::vector<double> ts(kChunk), zs(kChunk * d), eps(kChunk * d), tgt(kChunk * d),
      pred(kChunk * d);
  std::vector<size_t> ks(kChunk);

  for (size_t start = 0; start < total; start += kChunk) {
    const size_t m = std::min(kChunk, total - start);
    for (size_t i = 0; i < m; ++i) {
      const size_t idx = start + i;
      const size_t j = idx / K;  // test point
      const size_t k = idx % K;  // stratum
      const double u = rng::uniform01(seed, Stream::EvalTime, idx);
      const double t = lo + (static_cast<double>(k) + u) * width;
      ts[i] = t;
      ks[i] = k;
      const double* x = cloud.point(j);
      const auto [a, s] = alpha_sigma(TimePoint(t));
      for (size_t dd = 0; dd < d; ++dd) {
        const double e = rng::normal(seed, Stream::EvalNoise, idx * d + dd);
        eps[i * d + dd] = e;
        zs[i * d + dd] = a * x[dd] + s * e;
      }
      make_target(space, std::span(x, d), std::span(eps.data() + i * d, d),
                  std::span(zs.data() + i * d, d), TimePoint(t),
                  std::span(tgt.data() + i * d, d));
    }
    model.predict(zs.data(), ts.data(), m, pred.data());
    for (size_t i = 0; i < m; ++i) {
      double sq = 0.0;
      for (size_t dd = 0; dd < d; ++dd) {
        const double r = tgt[i * d + dd] - pred[i * d + dd];
        sq += r * r;
      }
      sink(ts[i], ks[i], sq);
    }
  }
}

}  // namespace

LossEvalResult eval_losses(const Predictor& model, const PointCloud& cloud, int draws_per_point,
                           uint64_t seed, double t_min) {
  const size_t K = static_cast<size_t>(draws_per_point);
  const TargetSpace space = model.space();
  // Per-stratum first and second moments for each form.
  std::vector<std::array<KahanSum, 3>> sums(K), sq_sums(K);
  std::vector<size_t> counts(K, 0);

  for_each_draw(model, cloud, draws_per_point, seed, t_min,
                [&](double t, size_t k, double sq) {
                  const TimePoint tp(t);
                  const double vals[3] = {
                      loss_coefficient(LossForm::Nelbo, space, tp) * sq, sq,
                      loss_coefficient(LossForm::Rescaled, space, tp) * sq};
                  for (int f = 0; f < 3; ++f) {
                    sums[k][f].add(vals[f]);
                    sq_sums[k][f].add(vals[f] * vals[f]);
                  }
                  counts[k]++;
                });

  LossEvalResult out;
  double* means[3] = {&out.nelbo, &out.weighted, &out.rescaled};
  double* ses[3] = {&out.nelbo_se, &out.weighted_se, &out.rescaled_se};
  for (int f = 0; f < 3; ++f) {
    double mean = 0.0, var = 0.0;
    for (size_t k = 0; k < K; ++k) {
      const double nk = static_cast<double>(counts[k]);
      const double mk = sums[k][f].sum / nk;
      const double vk = (sq_sums[k][f].sum - nk * mk * mk) / (nk > 1 ? nk - 1 : 1);
      mean += mk;
      var += vk / nk;
    }
    *means[f] = mean / static_cast<double>(K);
    *ses[f] = std::sqrt(var) / static_cast<double>(K);
  }
  return out;
}

NelboEstimate nelbo_estimate(const Predictor& model, const PointCloud& cloud, int draws_per_point,
                             uint64_t seed, double t_min) {
  const LossEvalResult r = eval_losses(model, cloud, draws_per_point, seed, t_min);
  return {r.nelbo, r.nelbo_se};
}

BinnedLoss loss_vs_timestep(const Predictor& model, const PointCloud& cloud, LossForm form,
                            int bins, int draws_per_point, uint64_t seed, double t_min) {
  if (bins < 2) throw RangeError("loss_vs_timestep: need bins >= 2");
  const TargetSpace space = model.space();
  const double lo = t_min, hi = 1.0 - t_min;
  const double inv_width = static_cast<double>(bins) / (hi - lo);

  BinnedLoss out;
  out.lo.resize(bins);
  out.hi.resize(bins);
  out.count.assign(bins, 0);
  out.mean.assign(bins, 0.0);
  for (int b = 0; b < bins; ++b) {
    out.lo[b] = lo + (hi - lo) * b / bins;
    out.hi[b] = lo + (hi - lo) * (b + 1) / bins;
  }

  std::vector<KahanSum> bin_sums(bins);
  for_each_draw(model, cloud, draws_per_point, seed, t_min,
                [&](double t, size_t, double sq) {
                  const double v = loss_coefficient(form, space, TimePoint(t)) * sq;
                  int b = static_cast<int>((t - lo) * inv_width);
                  if (b >= bins) b = bins - 1;
                  if (b < 0) b = 0;
                  bin_sums[b].add(v);
                  out.count[b]++;
                });

  KahanSum total;
  size_t total_count = 0;
  for (int b = 0; b < bins; ++b) {
    total.add(bin_sums[b].sum);
    total_count += out.count[b];
    out.mean[b] = out.count[b] == 0 ? std::nan("")
                                    : bin_sums[b].sum / static_cast<double>(out.count[b]);
  }
  out.overall = total.sum / static_cast<double>(total_count);
  return out;
}

std::array<std::vector<double>, 4> scaling_curves(std::span<const double> t_grid) {
  std::array<std::vector<double>, 4> out;
  for (auto& col : out) col.reserve(t_grid.size());
  for (double t : t_grid) {
    const TimePoint tp(t);
    out[0].push_back(snr_scaling(TargetSpace::X, tp));
    out[1].push_back(snr_scaling(TargetSpace::Eps, tp));
    out[2].push_back(snr_scaling(TargetSpace::V, tp));
    out[3].push_back(snr_scaling(TargetSpace::S, tp));
  }
  return out;
}

namespace {
std::array<double, 2> cloud_mean(const PointCloud& c) {
  std::array<double, 2> m{0.0, 0.0};
  for (size_t i = 0; i < c.n; ++i) {
    m[0] += c.pts[2 * i];
    m[1] += c.pts[2 * i + 1];
  }
  m[0] /= static_cast<double>(c.n);
  m[1] /= static_cast<double>(c.n);
  return m;
}

std::array<double, 4> cloud_cov(const PointCloud& c) {
  const auto m = cloud_mean(c);
  std::array<double, 4> cov{0.0, 0.0, 0.0, 0.0};
  for (size_t i = 0; i < c.n; ++i) {
    const double dx = c.pts[2 * i] - m[0];
    const double dy = c.pts[2 * i + 1] - m[1];
    cov[0] += dx * dx;
    cov[1] += dx * dy;
    cov[3] += dy * dy;
  }
  const double denom = static_cast<double>(c.n - 1);  // unbiased estimator
  cov[0] /= denom;
  cov[1] /= denom;
  cov[2] = cov[1];
  cov[3] /= denom;
  return cov;
}
}  // namespace

double mean_distance(const PointCloud& a, const PointCloud& b) {
  if (a.n == 0 || b.n == 0) throw RangeError("mean_distance: empty cloud");
  const auto ma = cloud_mean(a);
  const auto mb = cloud_mean(b);
  return std::hypot(ma[0] - mb[0], ma[1] - mb[1]);
}

double covariance_distance(const PointCloud& a, const PointCloud& b) {
  if (a.n < 2 || b.n < 2) throw RangeError("covariance_distance: need at least 2 points");
  const auto ca = cloud_cov(a);
  const auto cb = cloud_cov(b);
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double df = ca[i] - cb[i];
    acc += df * df;
  }
  return std::sqrt(acc);
}

}  // namespace dll
