#pragma once

// Held-out loss estimation, moment metrics between point clouds, per-timestep
// loss binning, and the 1/w(t) scaling curves.
//
// The loss estimator is stratified in t: draw k of K for a test point uses t
// uniform within the k-th of K equal subintervals of [t_min, 1-t_min]. Draws
// are keyed by (seed, point, draw) only, never by the model, so estimates for
// different models produced with one seed are paired.

#include <array>
#include <span>
#include <vector>

#include "dll/datasets.hpp"
#include "dll/losses.hpp"
#include "dll/net.hpp"

namespace dll {

struct LossEvalResult {
  double nelbo = 0.0;
  double weighted = 0.0;
  double rescaled = 0.0;
  double nelbo_se = 0.0;
  double weighted_se = 0.0;
  double rescaled_se = 0.0;
};

LossEvalResult eval_losses(const Predictor& model, const PointCloud& cloud, int draws_per_point,
                           uint64_t seed, double t_min);

struct NelboEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

NelboEstimate nelbo_estimate(const Predictor& model, const PointCloud& cloud, int draws_per_point,
                             uint64_t seed, double t_min);

struct BinnedLoss {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<size_t> count;
  std::vector<double> mean;  // NaN for an empty bin
  double overall = 0.0;      // count-weighted mean over all draws
};

BinnedLoss loss_vs_timestep(const Predictor& model, const PointCloud& cloud, LossForm form,
                            int bins, int draws_per_point, uint64_t seed, double t_min);

// Columns in space order x, eps, v, s.
std::array<std::vector<double>, 4> scaling_curves(std::span<const double> t_grid);

double mean_distance(const PointCloud& a, const PointCloud& b);
double covariance_distance(const PointCloud& a, const PointCloud& b);

}  // namespace dll
