#include "dll/datasets.hpp"

#include <cmath>
#include <numbers>

#include "dll/rng.hpp"

namespace dll {

namespace datasets_detail {

std::vector<RawSample> generate_raw(DatasetKind kind, size_t n, uint64_t seed,
                                    const GeneratorParams& p) {
  if (n < 2) throw RangeError("generate: need n >= 2");
  constexpr double pi = std::numbers::pi;
  std::vector<RawSample> out(n);
  // Three independent draws per point: component selector, curve parameter,
  // and two noise normals.
  for (size_t i = 0; i < n; ++i) {
    const uint64_t base = 4 * i;
    const double u_sel = rng::uniform01(seed, Stream::DataGen, base);
    const double u_par = rng::uniform01(seed, Stream::DataGen, base + 1);
    const double n0 = rng::normal(seed, Stream::DataGen, base + 2);
    const double n1 = rng::normal(seed, Stream::DataGen, base + 3);
    RawSample s{};
    switch (kind) {
      case DatasetKind::Cluster: {
        const int c = std::min<int>(p.cluster_count - 1,
                                    static_cast<int>(u_sel * p.cluster_count));
        const double theta = 2.0 * pi * c / p.cluster_count;
        s.x = p.cluster_radius * std::cos(theta) + p.cluster_std * n0;
        s.y = p.cluster_radius * std::sin(theta) + p.cluster_std * n1;
        s.component = c;
        s.param = theta;
        break;
      }
      case DatasetKind::Ring: {
        const double theta = 2.0 * pi * u_par;
        const double r = p.ring_radius + p.ring_noise * n0;
        s.x = r * std::cos(theta);
        s.y = r * std::sin(theta);
        s.component = 0;
        s.param = theta;
        break;
      }
      case DatasetKind::Swiss: {
        const double u = pi * (p.swiss_turns_lo + (p.swiss_turns_hi - p.swiss_turns_lo) * u_par);
        const double scale = 1.0 / (p.swiss_turns_hi * pi);
        s.x = scale * u * std::cos(u) + p.swiss_noise * n0;
        s.y = scale * u * std::sin(u) + p.swiss_noise * n1;
        s.component = 0;
        s.param = u;
        break;
      }
      case DatasetKind::Waves: {
        const int c = std::min<int>(2, static_cast<int>(u_sel * 3));
        const double x = p.waves_half_width * (2.0 * u_par - 1.0);
        s.x = x;
        s.y = p.waves_amplitude * std::sin(p.waves_frequency * x) + p.waves_offsets[c] +
              p.waves_noise * n0;
        s.component = c;
        s.param = x;
        break;
      }
    }
    out[i] = s;
  }
  return out;
}

}  // namespace datasets_detail

PointCloud generate(DatasetKind kind, size_t n, uint64_t seed, const GeneratorParams& params) {
  const auto raw = datasets_detail::generate_raw(kind, n, seed, params);

  PointCloud cloud;
  cloud.n = n;
  cloud.kind = kind;
  cloud.seed = seed;
  cloud.pts.resize(2 * n);
  for (size_t i = 0; i < n; ++i) {
    cloud.pts[2 * i] = raw[i].x;
    cloud.pts[2 * i + 1] = raw[i].y;
  }

  // Zero mean, unit per-dimension std (population estimator, so the
  // normalized cloud's std is exactly 1 by construction).
  for (int d = 0; d < 2; ++d) {
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += cloud.pts[2 * i + d];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double c = cloud.pts[2 * i + d] - mean;
      var += c * c;
    }
    var /= static_cast<double>(n);
    const double inv_std = 1.0 / std::sqrt(var);
    for (size_t i = 0; i < n; ++i) cloud.pts[2 * i + d] = (cloud.pts[2 * i + d] - mean) * inv_std;
  }
  cloud.normalized = true;
  return cloud;
}

std::pair<PointCloud, PointCloud> split(const PointCloud& cloud, double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw RangeError("split: test_fraction must lie in (0,1)");
  const size_t n = cloud.n;
  const size_t n_test = static_cast<size_t>(std::llround(test_fraction * static_cast<double>(n)));
  if (n_test == 0 || n_test >= n) throw RangeError("split: degenerate split sizes");

  // Fisher-Yates keyed by the cloud seed.
  std::vector<uint32_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = static_cast<uint32_t>(i);
  for (size_t i = n - 1; i > 0; --i) {
    const uint32_t j = rng::below(cloud.seed, Stream::Split, i, static_cast<uint32_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }

  PointCloud train, test;
  train.kind = test.kind = cloud.kind;
  train.seed = test.seed = cloud.seed;
  train.normalized = test.normalized = cloud.normalized;
  train.n = n - n_test;
  test.n = n_test;
  train.pts.resize(2 * train.n);
  test.pts.resize(2 * test.n);
  for (size_t i = 0; i < train.n; ++i) {
    train.pts[2 * i] = cloud.pts[2 * perm[i]];
    train.pts[2 * i + 1] = cloud.pts[2 * perm[i] + 1];
  }
  for (size_t i = 0; i < n_test; ++i) {
    const uint32_t src = perm[train.n + i];
    test.pts[2 * i] = cloud.pts[2 * src];
    test.pts[2 * i + 1] = cloud.pts[2 * src + 1];
  }
  return {std::move(train), std::move(test)};
}

}  // namespace dll
