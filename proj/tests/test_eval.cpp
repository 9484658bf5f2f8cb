#include <cmath>

#include "doctest.h"
#include "dll/eval.hpp"
#include "dll/trainer.hpp"
#include "oracles.hpp"

using namespace dll;

namespace {

PointCloud make_cloud(std::vector<double> pts) {
  PointCloud c;
  c.n = pts.size() / 2;
  c.pts = std::move(pts);
  c.normalized = true;
  return c;
}

class ConstantXPredictor final : public Predictor {
 public:
  explicit ConstantXPredictor(Vec x0) : x0_(std::move(x0)) {}
  TargetSpace space() const override { return TargetSpace::X; }
  int data_dim() const override { return static_cast<int>(x0_.size()); }
  void predict(const double*, const double*, size_t n, double* out) const override {
    for (size_t i = 0; i < n; ++i)
      for (size_t d = 0; d < x0_.size(); ++d) out[i * x0_.size() + d] = x0_[d];
  }

 private:
  Vec x0_;
};

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("mean distance") {
  const PointCloud a = generate(DatasetKind::Cluster, 500, 2);
  CHECK(mean_distance(a, a) == 0.0);

  PointCloud b = a;
  for (size_t i = 0; i < b.n; ++i) {
    b.pts[2 * i] += 3.0;
    b.pts[2 * i + 1] += 4.0;
  }
  CHECK(mean_distance(a, b) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(mean_distance(b, a) == doctest::Approx(5.0).epsilon(1e-12));  // symmetry

  PointCloud empty;
  CHECK_THROWS_AS(mean_distance(a, empty), RangeError);
}

TEST_CASE("covariance distance") {
  const PointCloud a = generate(DatasetKind::Swiss, 500, 3);
  CHECK(covariance_distance(a, a) == 0.0);

  // axis-aligned 4-point clouds with Cov = c*I (unbiased): Cov I vs 2I
  const double r1 = std::sqrt(1.5), r2 = std::sqrt(3.0);
  const PointCloud c1 = make_cloud({r1, 0.0, -r1, 0.0, 0.0, r1, 0.0, -r1});
  const PointCloud c2 = make_cloud({r2, 0.0, -r2, 0.0, 0.0, r2, 0.0, -r2});
  CHECK(covariance_distance(c1, c2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // shift invariance
  PointCloud c1s = c1, c2s = c2;
  for (size_t i = 0; i < c1s.n; ++i) {
    c1s.pts[2 * i] += 7.0;
    c2s.pts[2 * i] += 7.0;
    c1s.pts[2 * i + 1] -= 2.0;
    c2s.pts[2 * i + 1] -= 2.0;
  }
  CHECK(covariance_distance(c1s, c2s) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  const PointCloud one = make_cloud({0.0, 0.0});
  CHECK_THROWS_AS(covariance_distance(c1, one), RangeError);
}

TEST_CASE("nelbo_estimate: zero for an exact predictor, deterministic") {
  const PointCloud one = make_cloud({0.4, -0.2});
  const ConstantXPredictor oracle({0.4, -0.2});
  const NelboEstimate e = nelbo_estimate(oracle, one, 8, 42, 1e-2);
  CHECK(e.value == 0.0);
  CHECK(e.std_error == 0.0);

  const PointCloud cloud = generate(DatasetKind::Ring, 800, 5);
  DenoiserModel m = init_model(Architecture{2, kTimeFeatureDim, 16, 7}, TargetSpace::Eps, 3);
  const ModelPredictor pred(m);
  const NelboEstimate a = nelbo_estimate(pred, cloud, 4, 42, 1e-2);
  const NelboEstimate b = nelbo_estimate(pred, cloud, 4, 42, 1e-2);
  CHECK(a.value == b.value);
  CHECK(nelbo_estimate(pred, cloud, 4, 43, 1e-2).value != a.value);
}

TEST_CASE("nelbo_estimate: doubling the draw budget stays within the error bars") {
  const PointCloud cloud = generate(DatasetKind::Ring, 1000, 6);
  DenoiserModel m = init_model(Architecture{2, kTimeFeatureDim, 16, 7}, TargetSpace::Eps, 4);
  const ModelPredictor pred(m);
  const NelboEstimate a = nelbo_estimate(pred, cloud, 8, 42, 1e-2);
  const NelboEstimate b = nelbo_estimate(pred, cloud, 16, 42, 1e-2);
  CHECK(std::fabs(a.value - b.value) < 3.0 * std::max(a.std_error, b.std_error));
}

TEST_CASE("binned losses: accounting identity against the overall estimate") {
  const PointCloud cloud = generate(DatasetKind::Waves, 600, 7);
  DenoiserModel m = init_model(Architecture{2, kTimeFeatureDim, 16, 7}, TargetSpace::V, 5);
  const ModelPredictor pred(m);

  const LossEvalResult overall = eval_losses(pred, cloud, 6, 99, 1e-2);
  for (LossForm form : {LossForm::Nelbo, LossForm::Weighted, LossForm::Rescaled}) {
    const BinnedLoss bins = loss_vs_timestep(pred, cloud, form, 20, 6, 99, 1e-2);
    double weighted_sum = 0.0;
    size_t count = 0;
    for (int b = 0; b < 20; ++b) {
      if (bins.count[b] == 0) continue;
      weighted_sum += bins.mean[b] * static_cast<double>(bins.count[b]);
      count += bins.count[b];
    }
    CHECK(count == cloud.n * 6);
    const double recombined = weighted_sum / static_cast<double>(count);
    CHECK(recombined == doctest::Approx(bins.overall).epsilon(1e-10));
    const double direct = form == LossForm::Nelbo     ? overall.nelbo
                          : form == LossForm::Weighted ? overall.weighted
                                                       : overall.rescaled;
    CHECK(bins.overall == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("binned losses: oracle model zeros every bin") {
  const PointCloud one = make_cloud({0.1, 0.9});
  const ConstantXPredictor oracle({0.1, 0.9});
  const BinnedLoss bins = loss_vs_timestep(oracle, one, LossForm::Weighted, 10, 20, 3, 1e-2);
  for (int b = 0; b < 10; ++b) {
    if (bins.count[b] > 0) CHECK(bins.mean[b] == 0.0);
  }
}

TEST_CASE("binned losses: zero x-model is flat near the data second moment") {
  const PointCloud cloud = generate(DatasetKind::Ring, 1000, 8);
  DenoiserModel m = init_model(Architecture{}, TargetSpace::X, 1);
  std::fill(m.params.begin(), m.params.end(), 0.0);
  const ModelPredictor pred(m);
  const BinnedLoss bins = loss_vs_timestep(pred, cloud, LossForm::Weighted, 20, 8, 11, 1e-2);
  double lo = 1e300, hi = -1e300;
  for (int b = 0; b < 20; ++b) {
    REQUIRE(bins.count[b] > 0);
    lo = std::min(lo, bins.mean[b]);
    hi = std::max(hi, bins.mean[b]);
  }
  CHECK(lo > 1.4);
  CHECK(hi < 2.6);
  CHECK(std::fabs(bins.overall - 2.0) < 0.15);
}

TEST_CASE("binned losses: sparse draws leave empty bins marked missing") {
  const PointCloud one = make_cloud({0.2, 0.2});
  const ConstantXPredictor oracle({0.2, 0.2});
  // one point, one draw: exactly one of 20 bins can be populated
  const BinnedLoss bins = loss_vs_timestep(oracle, one, LossForm::Weighted, 20, 1, 5, 1e-2);
  size_t populated = 0, missing = 0;
  for (int b = 0; b < 20; ++b) {
    if (bins.count[b] == 0) {
      CHECK(std::isnan(bins.mean[b]));
      ++missing;
    } else {
      ++populated;
    }
  }
  CHECK(populated == 1);
  CHECK(missing == 19);
  CHECK_THROWS_AS(loss_vs_timestep(oracle, one, LossForm::Weighted, 1, 1, 5, 1e-2), RangeError);
}

TEST_CASE("stratified draws land one per stratum") {
  // with bins == draws_per_point the strata align with the bins, so every bin
  // receives exactly one draw per point
  const PointCloud cloud = generate(DatasetKind::Cluster, 50, 9);
  const ConstantXPredictor oracle({0.0, 0.0});
  const BinnedLoss bins = loss_vs_timestep(oracle, cloud, LossForm::Weighted, 8, 8, 31, 1e-3);
  for (int b = 0; b < 8; ++b) CHECK(bins.count[b] == cloud.n);
}

TEST_CASE("scaling curves") {
  std::vector<double> grid;
  for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
  const auto cols = scaling_curves(grid);
  REQUIRE(cols[0].size() == grid.size());

  // x column at t = 0.5 is -SNR'(0.5) = 2 pi
  CHECK(cols[0][49] == doctest::Approx(6.283185307179586).epsilon(1e-12));

  for (size_t i = 0; i < grid.size(); ++i) {
    for (int c = 0; c < 4; ++c) CHECK(cols[c][i] > 0.0);
    if (grid[i] < 0.1) {
      CHECK(cols[1][i] > cols[3][i]);  // eps scaling dominates s early
      CHECK(cols[2][i] > cols[3][i]);  // v scaling dominates s early
    }
  }
}

}  // TEST_SUITE
