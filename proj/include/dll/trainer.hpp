#pragma once

// Monte Carlo training over (t, eps) draws for one (space, loss-form, dataset)
// cell. Fully deterministic: the RunRecord is a pure function of the config
// and the input clouds.

#include <cstdint>
#include <utility>
#include <vector>

#include "dll/csv.hpp"
#include "dll/datasets.hpp"
#include "dll/eval.hpp"
#include "dll/losses.hpp"
#include "dll/net.hpp"

namespace dll {

// Defaults shared by the trainer and the CLI. The NELBO coefficients diverge
// at both endpoints, so t is drawn from [t_min, 1 - t_min]; 1e-2 keeps the
// largest per-draw scaling (-SNR' at t_min) near 8e5, which trains stably and
// leaves the held-out NELBO estimate finite-variance enough to compare runs.
inline constexpr size_t kDefaultEpochs = 60;
inline constexpr size_t kDefaultBatch = 512;
inline constexpr double kDefaultLearningRate = 1e-3;
inline constexpr double kDefaultTMin = 1e-2;
inline constexpr int kDefaultEvalDraws = 8;
inline constexpr int kNumBins = 20;

struct TrainConfig {
  TargetSpace space = TargetSpace::Eps;
  LossForm form = LossForm::Weighted;  // training supports Nelbo | Weighted
  DatasetKind dataset = DatasetKind::Ring;
  size_t epochs = kDefaultEpochs;
  size_t batch_size = kDefaultBatch;
  double learning_rate = kDefaultLearningRate;
  uint64_t seed = 1;
  double t_min = kDefaultTMin;
  int eval_draws_per_point = kDefaultEvalDraws;
  int hidden_width = 128;

  void validate() const {
    if (form == LossForm::Rescaled)
      throw RangeError("TrainConfig: rescaled is an evaluation form, not a training form");
    if (batch_size < 1) throw RangeError("TrainConfig: batch_size must be >= 1");
    if (epochs < 1) throw RangeError("TrainConfig: epochs must be >= 1");
    if (!(t_min > 0.0 && t_min < 0.5)) throw RangeError("TrainConfig: t_min must lie in (0, 0.5)");
    if (!(learning_rate > 0.0)) throw RangeError("TrainConfig: learning_rate must be positive");
    if (eval_draws_per_point < 1) throw RangeError("TrainConfig: eval_draws_per_point >= 1");
  }
};

struct RunRecord {
  std::vector<EpochRow> epochs;   // one row per epoch
  std::vector<BinRowCsv> bins;    // kNumBins rows per epoch
  DenoiserModel model;
  double wall_seconds = 0.0;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
};

// beta1=0.9, beta2=0.999, eps=1e-8, bias-corrected.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               double lr);

RunRecord train(const TrainConfig& config, const PointCloud& train_cloud,
                const PointCloud& test_cloud);

// (nelbo, weighted, rescaled) on the test cloud with the trainer's stratified
// estimator and the config's seed.
std::array<double, 3> evaluate_epoch(const Predictor& model, const PointCloud& test_cloud,
                                     const TrainConfig& config);

namespace trainer_detail {
// Test seams: `oracle_pred_equals_target` replaces every prediction with its
// target (zero-residual step); `example_log` receives (t, loss) per example.
RunRecord train_impl(const TrainConfig& config, const PointCloud& train_cloud,
                     const PointCloud& test_cloud, bool oracle_pred_equals_target,
                     std::vector<std::pair<double, double>>* example_log);
}  // namespace trainer_detail

}  // namespace dll
