#include "dll/trainer.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "dll/rng.hpp"

namespace dll {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
}  // namespace

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               double lr) {
  if (grads.size() != params.size()) throw DimensionError("adam_step: gradient shape mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size()) throw DimensionError("adam_step: state shape mismatch");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));
  kernels::adam_update(params.data(), grads.data(), state.m.data(), state.v.data(), params.size(),
                       lr, kBeta1, kBeta2, kAdamEps, bc1, bc2);
}

std::array<double, 3> evaluate_epoch(const Predictor& model, const PointCloud& test_cloud,
                                     const TrainConfig& config) {
  const LossEvalResult r = eval_losses(model, test_cloud, config.eval_draws_per_point, config.seed,
                                       config.t_min);
  return {r.nelbo, r.weighted, r.rescaled};
}

namespace trainer_detail {

RunRecord train_impl(const TrainConfig& cfg, const PointCloud& train_cloud,
                     const PointCloud& test_cloud, bool oracle_pred_equals_target,
                     std::vector<std::pair<double, double>>* example_log) {
  cfg.validate();
  if (!train_cloud.normalized || !test_cloud.normalized)
    throw RangeError("train: clouds must be normalized");
  const auto t_start = std::chrono::steady_clock::now();

  Architecture arch;
  arch.hidden_width = cfg.hidden_width;
  const size_t d = static_cast<size_t>(arch.data_dim);
  DenoiserModel model = init_model(arch, cfg.space, cfg.seed);
  AdamState adam;
  NetWorkspace ws;

  const size_t n = train_cloud.n;
  const size_t B = cfg.batch_size;
  const double t_lo = cfg.t_min;
  const double t_hi = 1.0 - cfg.t_min;

  std::vector<uint32_t> perm(n);
  std::vector<double> xb, epsb, zb, tb, tgtb, predb, upstream;
  std::vector<double> grad;

  RunRecord rec;
  rec.epochs.reserve(cfg.epochs);
  rec.bins.reserve(cfg.epochs * kNumBins);

  size_t step_count = 0;
  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Epoch-local shuffle; batches sample without replacement.
    for (size_t i = 0; i < n; ++i) perm[i] = static_cast<uint32_t>(i);
    for (size_t i = n - 1; i > 0; --i) {
      const uint32_t j = rng::below(cfg.seed, Stream::Shuffle, epoch * n + i,
                                    static_cast<uint32_t>(i + 1));
      std::swap(perm[i], perm[j]);
    }

    double epoch_loss_sum = 0.0;
    std::array<double, kNumBins> bin_sum{};
    std::array<size_t, kNumBins> bin_count{};

    for (size_t pos = 0; pos < n; pos += B) {
      const size_t m = std::min(B, n - pos);
      xb.resize(m * d);
      epsb.resize(m * d);
      zb.resize(m * d);
      tb.resize(m);
      tgtb.resize(m * d);
      predb.resize(m * d);
      upstream.resize(m * d);

      for (size_t i = 0; i < m; ++i) {
        const uint64_t draw = epoch * n + pos + i;  // unique per example visit
        const double* x = train_cloud.point(perm[pos + i]);
        const double t = rng::uniform(cfg.seed, Stream::TrainTime, draw, t_lo, t_hi);
        tb[i] = t;
        const auto [a, s] = alpha_sigma(TimePoint(t));
        for (size_t dd = 0; dd < d; ++dd) {
          xb[i * d + dd] = x[dd];
          const double e = rng::normal(cfg.seed, Stream::TrainNoise, draw * d + dd);
          epsb[i * d + dd] = e;
          zb[i * d + dd] = a * x[dd] + s * e;
        }
        make_target(cfg.space, std::span(xb.data() + i * d, d), std::span(epsb.data() + i * d, d),
                    std::span(zb.data() + i * d, d), TimePoint(t),
                    std::span(tgtb.data() + i * d, d));
      }

      net_forward(model, zb.data(), tb.data(), m, predb.data(), ws);
      if (oracle_pred_equals_target)
        std::copy(tgtb.begin(), tgtb.end(), predb.begin());

      // Mean over the batch of c(form,space,t) * ||target - pred||^2; the
      // analytic gradient w.r.t. the prediction is 2c/m * (pred - target).
      double batch_loss = 0.0;
      double batch_t_min = 1.0, batch_t_max = 0.0;
      for (size_t i = 0; i < m; ++i) {
        const double t = tb[i];
        batch_t_min = std::min(batch_t_min, t);
        batch_t_max = std::max(batch_t_max, t);
        const double c = loss_coefficient(cfg.form, cfg.space, TimePoint(t));
        double sq = 0.0;
        for (size_t dd = 0; dd < d; ++dd) {
          const double r = predb[i * d + dd] - tgtb[i * d + dd];
          sq += r * r;
          upstream[i * d + dd] = 2.0 * c / static_cast<double>(m) * r;
        }
        const double loss_i = c * sq;
        batch_loss += loss_i;
        epoch_loss_sum += loss_i;
        int b = static_cast<int>((t - t_lo) / (t_hi - t_lo) * kNumBins);
        if (b >= kNumBins) b = kNumBins - 1;
        bin_sum[b] += loss_i;
        bin_count[b]++;
        if (example_log != nullptr) example_log->emplace_back(t, loss_i);
      }
      batch_loss /= static_cast<double>(m);
      ++step_count;
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "non-finite loss " << batch_loss << " at step " << step_count << " (epoch "
            << epoch + 1 << ", t in [" << batch_t_min << ", " << batch_t_max << "])";
        throw NumericError(msg.str());
      }

      net_backward(model, ws, upstream.data(), m, grad);
      adam_step(model.params, grad, adam, cfg.learning_rate);
    }

    const ModelPredictor pred(model);
    const auto [nelbo, weighted, rescaled] = evaluate_epoch(pred, test_cloud, cfg);
    rec.epochs.push_back({epoch + 1, epoch_loss_sum / static_cast<double>(n), nelbo, weighted,
                          rescaled});
    for (int b = 0; b < kNumBins; ++b) {
      const double lo = t_lo + (t_hi - t_lo) * b / kNumBins;
      const double hi = t_lo + (t_hi - t_lo) * (b + 1) / kNumBins;
      rec.bins.push_back({epoch + 1, lo, hi, bin_count[b],
                          bin_count[b] == 0 ? std::nan("")
                                            : bin_sum[b] / static_cast<double>(bin_count[b])});
    }
  }

  rec.model = std::move(model);
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rec;
}

}  // namespace trainer_detail

RunRecord train(const TrainConfig& config, const PointCloud& train_cloud,
                const PointCloud& test_cloud) {
  return trainer_detail::train_impl(config, train_cloud, test_cloud, false, nullptr);
}

}  // namespace dll
