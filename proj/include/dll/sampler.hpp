#pragma once

// Ancestral reverse-process sampling through the x-parameterized posterior
// q(z_s | z_t, x = x_hat). N uniform steps walk t from 1 down to 1/N; the
// final step emits x_hat directly instead of a noisy z_0.
//
// The very first prediction would sit at t = 1 exactly, where the eps- and
// score-inversions divide by alpha = 0. That prediction (and only that one)
// is evaluated at the midpoint of the top interval, t = 1 - 1/(2N), while the
// posterior transition keeps its nominal (s, t) = ((N-1)/N, 1).

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dll/datasets.hpp"
#include "dll/net.hpp"

namespace dll {

struct SampleConfig {
  int num_steps = 512;
  size_t num_samples = 2000;
  uint64_t seed = 7;
  std::optional<std::pair<double, double>> clip;  // per-dimension range, off by default

  void validate() const {
    if (num_steps < 1) throw RangeError("SampleConfig: num_steps must be >= 1");
    if (num_samples < 1) throw RangeError("SampleConfig: num_samples must be >= 1");
    if (clip && !(clip->first < clip->second))
      throw RangeError("SampleConfig: clip range must satisfy lo < hi");
  }
};

// Nominal reverse grid [( (i-1)/N, i/N )] for i = N down to 1.
std::vector<std::pair<double, double>> step_grid(int num_steps);

PointCloud sample(const Predictor& model, const SampleConfig& config);

}  // namespace dll
