#include <cmath>

#include "doctest.h"
#include "dll/spaces.hpp"
#include "oracles.hpp"

using namespace dll;

namespace {
Vec rand_vec(uint64_t salt) {
  return {oracles::test_normal(salt), oracles::test_normal(salt + 1)};
}
double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}
}  // namespace

TEST_SUITE("spaces") {

TEST_CASE("noisify endpoints and midpoint") {
  const Vec x{1.0, 0.0}, eps{0.0, 1.0};
  CHECK(max_abs_diff(noisify(x, eps, TimePoint(0.0)), x) == 0.0);
  CHECK(max_abs_diff(noisify(x, eps, TimePoint(1.0)), eps) < 1e-15);
  const Vec z = noisify(x, eps, TimePoint(0.5));
  CHECK(z[0] == doctest::Approx(0.7071067811865476).epsilon(1e-12));
  CHECK(z[1] == doctest::Approx(0.7071067811865476).epsilon(1e-12));
  const Vec bad{1.0};
  Vec out(2);
  CHECK_THROWS_AS(noisify(bad, eps, TimePoint(0.5), out), DimensionError);
}

TEST_CASE("v_target endpoints and midpoint") {
  const Vec x{1.0, 0.0}, eps{0.0, 1.0};
  CHECK(max_abs_diff(v_target(x, eps, TimePoint(0.0)), eps) == 0.0);
  Vec minus_x{-1.0, 0.0};
  CHECK(max_abs_diff(v_target(x, eps, TimePoint(1.0)), minus_x) < 1e-15);
  const Vec v = v_target(x, eps, TimePoint(0.5));
  CHECK(v[0] == doctest::Approx(-0.7071067811865476).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(0.7071067811865476).epsilon(1e-12));
}

TEST_CASE("score target") {
  const Vec x{0.3, -0.4};
  // eps = 0 puts z at the Gaussian mean, so the score vanishes
  const Vec z0 = noisify(x, {0.0, 0.0}, TimePoint(0.37));
  const Vec s0 = score_target(x, z0, TimePoint(0.37));
  CHECK(std::fabs(s0[0]) < 1e-12);
  CHECK(std::fabs(s0[1]) < 1e-12);

  const Vec eps{1.0, 0.0};
  const Vec z = noisify(x, eps, TimePoint(0.5));
  const Vec s = score_target(x, z, TimePoint(0.5));
  CHECK(s[0] == doctest::Approx(-1.4142135623730951).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(0.0).epsilon(1e-12));

  // ||score|| = ||eps|| / sigma, and score = -eps/sigma componentwise
  for (int i = 0; i < 100; ++i) {
    const Vec xx = rand_vec(10 * i), ee = rand_vec(10 * i + 2);
    const double t = oracles::test_uniform(10 * i + 4, 0.01, 0.99);
    const Vec zz = noisify(xx, ee, TimePoint(t));
    const Vec ss = score_target(xx, zz, TimePoint(t));
    const double sigma = alpha_sigma(TimePoint(t)).second;
    for (int d = 0; d < 2; ++d) CHECK(ss[d] == doctest::Approx(-ee[d] / sigma).epsilon(1e-12));
  }
  CHECK_THROWS_AS(score_target(x, z0, TimePoint(0.0)), DivergenceError);
}

TEST_CASE("x_from_eps") {
  const Vec z{1.0, 1.0}, eps_hat{0.0, 1.0};
  const Vec x = {0.0, 0.0};
  Vec out(2);
  x_from_eps(z, eps_hat, TimePoint(0.0), out);
  CHECK(max_abs_diff(out, z) == 0.0);  // sigma=0, alpha=1

  x_from_eps(z, eps_hat, TimePoint(0.5), out);
  CHECK(out[0] == doctest::Approx(1.4142135623730951).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(0.41421356237309515).epsilon(1e-12));

  CHECK_THROWS_AS(x_from_eps(z, eps_hat, TimePoint(1.0), out), DivergenceError);
  (void)x;
}

TEST_CASE("x_from_v endpoints") {
  const Vec z{0.2, -0.7}, v_hat{0.5, 0.1};
  Vec out(2);
  x_from_v(z, v_hat, TimePoint(0.0), out);
  CHECK(max_abs_diff(out, z) == 0.0);
  x_from_v(z, v_hat, TimePoint(1.0), out);
  CHECK(out[0] == doctest::Approx(-v_hat[0]).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(-v_hat[1]).epsilon(1e-12));
}

TEST_CASE("x_from_score") {
  const Vec z{0.4, -1.1};
  Vec out(2);
  // zero score: x = z / alpha
  x_from_score(z, Vec{0.0, 0.0}, TimePoint(0.5), out);
  CHECK(out[0] == doctest::Approx(z[0] * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(z[1] * std::sqrt(2.0)).epsilon(1e-12));
  // t -> 0 with bounded score: x -> z
  x_from_score(z, Vec{3.0, -2.0}, TimePoint(1e-9), out);
  CHECK(max_abs_diff(out, z) < 1e-8);
  CHECK_THROWS_AS(x_from_score(z, Vec{0.0, 0.0}, TimePoint(1.0), out), DivergenceError);
}

TEST_CASE("round trips recover x within 1e-10") {
  for (int i = 0; i < 1000; ++i) {
    const Vec x = rand_vec(100 + 10 * i), eps = rand_vec(103 + 10 * i);
    const double t = oracles::test_uniform(107 + 10 * i, 0.01, 0.99);
    const TimePoint tp(t);
    const Vec z = noisify(x, eps, tp);
    Vec out(2);

    x_from_eps(z, eps, tp, out);
    CHECK(max_abs_diff(out, x) < 1e-10);
    x_from_v(z, v_target(x, eps, tp), tp, out);
    CHECK(max_abs_diff(out, x) < 1e-10);
    x_from_score(z, score_target(x, z, tp), tp, out);
    CHECK(max_abs_diff(out, x) < 1e-10);
  }
}

TEST_CASE("to_x_prediction dispatch and consistency across spaces") {
  for (int i = 0; i < 200; ++i) {
    const Vec x = rand_vec(5000 + 10 * i), eps = rand_vec(5003 + 10 * i);
    const Vec x_hat = rand_vec(5006 + 10 * i);
    const double t = oracles::test_uniform(5009 + 10 * i, 0.01, 0.99);
    const TimePoint tp(t);
    const Vec z = noisify(x, eps, tp);
    const auto [a, s] = alpha_sigma(tp);

    // X space is the identity dispatch
    const Vec back_x = to_x_prediction({TargetSpace::X, x_hat}, z, tp);
    CHECK(max_abs_diff(back_x, x_hat) == 0.0);

    // implied predictions of the same x_hat agree after conversion back
    Vec eps_hat(2), v_hat(2), s_hat(2);
    eps_from_x(z, x_hat, tp, eps_hat);
    for (int d = 0; d < 2; ++d) {
      v_hat[d] = a * eps_hat[d] - s * x_hat[d];
      s_hat[d] = -eps_hat[d] / s;
    }
    CHECK(max_abs_diff(to_x_prediction({TargetSpace::Eps, eps_hat}, z, tp), x_hat) < 1e-10);
    CHECK(max_abs_diff(to_x_prediction({TargetSpace::V, v_hat}, z, tp), x_hat) < 1e-10);
    CHECK(max_abs_diff(to_x_prediction({TargetSpace::S, s_hat}, z, tp), x_hat) < 1e-10);

    // exact targets convert back to the original x
    CHECK(max_abs_diff(to_x_prediction({TargetSpace::Eps, eps}, z, tp), x) < 1e-10);
    CHECK(max_abs_diff(to_x_prediction({TargetSpace::S, score_target(x, z, tp)}, z, tp), x) <
          1e-10);
  }
}

TEST_CASE("make_target produces each space's target") {
  const Vec x = rand_vec(9100), eps = rand_vec(9102);
  const TimePoint t(0.37);
  const Vec z = noisify(x, eps, t);
  Vec out(2);
  make_target(TargetSpace::X, x, eps, z, t, out);
  CHECK(max_abs_diff(out, x) == 0.0);
  make_target(TargetSpace::Eps, x, eps, z, t, out);
  CHECK(max_abs_diff(out, eps) == 0.0);
  make_target(TargetSpace::V, x, eps, z, t, out);
  CHECK(max_abs_diff(out, v_target(x, eps, t)) == 0.0);
  make_target(TargetSpace::S, x, eps, z, t, out);
  CHECK(max_abs_diff(out, score_target(x, z, t)) == 0.0);
}

}  // TEST_SUITE
