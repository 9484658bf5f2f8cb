#include <cmath>

#include "doctest.h"
#include "dll/forward.hpp"
#include "oracles.hpp"

using namespace dll;

TEST_SUITE("forward") {

TEST_CASE("sample_marginal at t=0 returns x exactly") {
  RngState rng{5, Stream::Test, 0};
  const Vec x{0.7, -0.2};
  const auto [z, eps] = sample_marginal(x, TimePoint(0.0), rng);
  CHECK(z[0] == x[0]);
  CHECK(z[1] == x[1]);
  CHECK(eps.size() == 2);
}

TEST_CASE("sample_marginal moments match the forward marginal") {
  RngState rng{17, Stream::Test, 0};
  const Vec x{1.0, -0.5};
  const TimePoint t(0.5);
  const auto [a, s] = alpha_sigma(t);
  const size_t n = 100000;
  Vec sum(2, 0.0), sum_sq(2, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const auto [z, eps] = sample_marginal(x, t, rng);
    for (int d = 0; d < 2; ++d) {
      sum[d] += z[d];
      sum_sq[d] += z[d] * z[d];
    }
  }
  for (int d = 0; d < 2; ++d) {
    const double mean = sum[d] / n;
    const double var = sum_sq[d] / n - mean * mean;
    const double se_mean = s / std::sqrt(static_cast<double>(n));
    const double se_var = s * s * std::sqrt(2.0 / n);
    CHECK(std::fabs(mean - a * x[d]) < 4.0 * se_mean);
    CHECK(std::fabs(var - 0.5) < 4.0 * se_var);  // sigma^2(0.5) = 1/2
  }
}

TEST_CASE("posterior parameters") {
  const Vec z{1.0, 0.0}, x{0.0, 1.0};

  // s -> t limit degenerates to a point mass at z_t
  const auto lim = posterior_params(z, x, TimePoint(0.5 - 1e-9), TimePoint(0.5));
  CHECK(std::fabs(lim.mean[0] - z[0]) < 1e-6);
  CHECK(std::fabs(lim.mean[1] - z[1]) < 1e-6);
  CHECK(lim.var < 1e-6);
  CHECK(lim.var >= 0.0);

  const auto p = posterior_params(z, x, TimePoint(0.25), TimePoint(0.5));
  CHECK(p.mean[0] == doctest::Approx(0.22417076458398263).epsilon(1e-12));
  CHECK(p.mean[1] == doctest::Approx(0.7653668647301796).epsilon(1e-12));
  CHECK(p.var == doctest::Approx(0.12132034355964257).epsilon(1e-12));
  CHECK(p.var > 0.0);

  CHECK_THROWS_AS(posterior_params(z, x, TimePoint(0.5), TimePoint(0.25)), OrderingError);
  CHECK_THROWS_AS(posterior_params(z, x, TimePoint(0.5), TimePoint(0.5)), OrderingError);
}

TEST_CASE("posterior of the noiseless latent collapses to alpha_s x") {
  for (int i = 0; i < 100; ++i) {
    const Vec x{oracles::test_normal(700 + 3 * i), oracles::test_normal(701 + 3 * i)};
    const double s = oracles::test_uniform(90'000 + 2 * i, 0.05, 0.8);
    const double t = s + oracles::test_uniform(90'001 + 2 * i, 0.05, 0.19);
    const Vec z_t = noisify(x, {0.0, 0.0}, TimePoint(t));
    const auto p = posterior_params(z_t, x, TimePoint(s), TimePoint(t));
    const double as = alpha_sigma(TimePoint(s)).first;
    CHECK(p.mean[0] == doctest::Approx(as * x[0]).epsilon(1e-12));
    CHECK(p.mean[1] == doctest::Approx(as * x[1]).epsilon(1e-12));
  }
}

TEST_CASE("posterior variance stays within [0, sigma_s^2]") {
  for (int i = 0; i < 300; ++i) {
    const double s = oracles::test_uniform(91'000 + 2 * i, 0.01, 0.95);
    const double t = s + oracles::test_uniform(91'001 + 2 * i, 1e-4, 1.0 - s - 1e-12);
    const Vec z{0.1, 0.2}, x{0.3, 0.4};
    const auto p = posterior_params(z, x, TimePoint(s), TimePoint(std::min(t, 1.0)));
    const double ss = alpha_sigma(TimePoint(s)).second;
    CHECK(p.var >= 0.0);
    CHECK(p.var <= ss * ss + 1e-15);
  }
}

TEST_CASE("kl_transition: closed form equals the mean-difference route") {
  const Vec x{0.2, -0.3};
  CHECK(kl_transition(x, x, TimePoint(0.25), TimePoint(0.5)) == 0.0);

  for (int i = 0; i < 200; ++i) {
    const Vec xx{oracles::test_normal(800 + 4 * i), oracles::test_normal(801 + 4 * i)};
    const Vec x_hat{oracles::test_normal(802 + 4 * i), oracles::test_normal(803 + 4 * i)};
    const Vec z_t{oracles::test_normal(95'000 + i), oracles::test_normal(95'500 + i)};
    const double s = oracles::test_uniform(96'000 + 2 * i, 0.05, 0.85);
    const double t = s + oracles::test_uniform(96'001 + 2 * i, 0.02, 0.14);

    const double closed = kl_transition(xx, x_hat, TimePoint(s), TimePoint(t));
    const auto pq = posterior_params(z_t, xx, TimePoint(s), TimePoint(t));
    const auto pp = posterior_params(z_t, x_hat, TimePoint(s), TimePoint(t));
    const double mu_route = squared_distance(pq.mean, pp.mean) / (2.0 * pq.var);
    CHECK(closed == doctest::Approx(mu_route).epsilon(1e-10));
    CHECK(closed >= 0.0);
  }
  CHECK_THROWS_AS(kl_transition(x, x, TimePoint(0.5), TimePoint(0.25)), OrderingError);
  CHECK_THROWS_AS(kl_transition(x, x, TimePoint(0.0), TimePoint(0.25)), DivergenceError);
}

TEST_CASE("kl_transition agrees with a Monte Carlo estimate") {
  const Vec x{0.4, -0.1}, x_hat{-0.2, 0.5};
  const Vec z_t{0.3, 0.9};
  const TimePoint s(0.35), t(0.6);
  const double closed = kl_transition(x, x_hat, s, t);
  const auto pq = posterior_params(z_t, x, s, t);
  const auto pp = posterior_params(z_t, x_hat, s, t);

  // KL(q||p) = E_q[log q - log p]; equal variances cancel the log-determinant
  RngState rng{23, Stream::Test, 0};
  const size_t n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double logq = 0.0, logp = 0.0;
    for (int d = 0; d < 2; ++d) {
      const double u = pq.mean[d] + std::sqrt(pq.var) * rng.next_normal();
      logq += -(u - pq.mean[d]) * (u - pq.mean[d]) / (2.0 * pq.var);
      logp += -(u - pp.mean[d]) * (u - pp.mean[d]) / (2.0 * pp.var);
    }
    const double di = logq - logp;
    sum += di;
    sum_sq += di * di;
  }
  const double mc = sum / n;
  const double se = std::sqrt((sum_sq / n - mc * mc) / n);
  CHECK(std::fabs(mc - closed) < 4.0 * se);
}

TEST_CASE("compose_check: two-step sampling matches the one-step marginal") {
  const Vec x{0.8, -0.6};
  RngState rng{31, Stream::Test, 0};
  const auto stats = compose_check(x, TimePoint(0.3), TimePoint(0.7), rng, 100000);
  const auto [at, st] = alpha_sigma(TimePoint(0.7));
  for (int d = 0; d < 2; ++d) {
    const double se_mean = st / std::sqrt(100000.0);
    const double se_var = st * st * std::sqrt(2.0 / 99999.0);
    CHECK(std::fabs(stats.mean[d] - at * x[d]) < 4.0 * se_mean);
    CHECK(std::fabs(stats.var[d] - st * st) < 4.0 * se_var);
  }
}

TEST_CASE("compose_check degenerate and symmetric cases") {
  RngState rng{37, Stream::Test, 0};
  // s = t: the second transition is a point mass
  const Vec x{0.5, 0.5};
  const auto same = compose_check(x, TimePoint(0.4), TimePoint(0.4), rng, 20000);
  const auto [a4, s4] = alpha_sigma(TimePoint(0.4));
  for (int d = 0; d < 2; ++d) {
    CHECK(std::fabs(same.mean[d] - a4 * x[d]) < 4.0 * s4 / std::sqrt(20000.0));
  }
  // x = 0 keeps the mean at zero by symmetry
  const Vec zero{0.0, 0.0};
  const auto at0 = compose_check(zero, TimePoint(0.2), TimePoint(0.9), rng, 20000);
  const double st9 = alpha_sigma(TimePoint(0.9)).second;
  for (int d = 0; d < 2; ++d) CHECK(std::fabs(at0.mean[d]) < 4.0 * st9 / std::sqrt(20000.0));
}

}  // TEST_SUITE
