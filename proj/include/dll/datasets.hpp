#pragma once

// The four synthetic 2D datasets. Raw shapes are generated at O(1) scale and
// then normalized to zero mean, unit per-dimension std, matching the unit
// Gaussian prior of the variance-preserving schedule.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dll/errors.hpp"

namespace dll {

enum class DatasetKind { Cluster, Ring, Swiss, Waves };

inline constexpr std::array<DatasetKind, 4> kAllDatasets = {
    DatasetKind::Cluster, DatasetKind::Ring, DatasetKind::Swiss, DatasetKind::Waves};

inline const char* to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::Cluster: return "cluster";
    case DatasetKind::Ring: return "ring";
    case DatasetKind::Swiss: return "swiss";
    case DatasetKind::Waves: return "waves";
  }
  return "?";
}

inline DatasetKind dataset_from_string(const std::string& s) {
  if (s == "cluster") return DatasetKind::Cluster;
  if (s == "ring") return DatasetKind::Ring;
  if (s == "swiss") return DatasetKind::Swiss;
  if (s == "waves") return DatasetKind::Waves;
  throw RangeError("unknown dataset '" + s + "' (expected cluster|ring|swiss|waves)");
}

// N x 2 row-major point set.
struct PointCloud {
  size_t n = 0;
  std::vector<double> pts;
  DatasetKind kind = DatasetKind::Ring;
  uint64_t seed = 0;
  bool normalized = false;

  const double* point(size_t i) const { return pts.data() + 2 * i; }
  double* point(size_t i) { return pts.data() + 2 * i; }
};

struct GeneratorParams {
  int cluster_count = 6;
  double cluster_radius = 1.5;
  double cluster_std = 0.12;
  double ring_radius = 1.0;
  double ring_noise = 0.05;
  double swiss_turns_lo = 1.5;  // in units of pi
  double swiss_turns_hi = 4.5;
  double swiss_noise = 0.02;
  double waves_amplitude = 0.4;
  double waves_frequency = 3.0;
  double waves_half_width = 2.0;
  double waves_noise = 0.05;
  std::array<double, 3> waves_offsets = {-1.0, 0.0, 1.0};
};

PointCloud generate(DatasetKind kind, size_t n, uint64_t seed,
                    const GeneratorParams& params = {});

// Deterministic shuffle by the cloud's seed; disjoint and covering.
std::pair<PointCloud, PointCloud> split(const PointCloud& cloud, double test_fraction);

namespace datasets_detail {

// Pre-normalization sample with its generating component (blob index, curve
// index, ...) and scalar parameter (angle, spiral position, x coordinate).
struct RawSample {
  double x;
  double y;
  int component;
  double param;
};

std::vector<RawSample> generate_raw(DatasetKind kind, size_t n, uint64_t seed,
                                    const GeneratorParams& params);

}  // namespace datasets_detail
}  // namespace dll
