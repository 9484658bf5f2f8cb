#pragma once

// Variance-preserving cosine noise schedule:
//   alpha_t = cos(pi*t/2),  sigma_t = sin(pi*t/2),  alpha^2 + sigma^2 = 1.
// SNR(t) = alpha^2/sigma^2 with the closed-form derivative
// SNR'(t) = -pi*alpha/sigma^3, plus the per-space loss weights w(t) that tie
// the weighted losses back to the NELBO.

#include <cmath>
#include <numbers>
#include <utility>

#include "dll/errors.hpp"
#include "dll/target_space.hpp"

namespace dll {

inline constexpr double kPi = std::numbers::pi;

// Time in [0,1]; validated once at construction.
class TimePoint {
 public:
  explicit TimePoint(double t) : t_(t) {
    if (!(t >= 0.0 && t <= 1.0)) throw RangeError("TimePoint: t outside [0,1]");
  }
  double value() const { return t_; }

 private:
  double t_;
};

struct ScheduleValues {
  double alpha;
  double sigma;
  double snr;
  double snr_prime;
};

struct TransitionCoeffs {
  double alpha_ts;   // alpha_{t|s} = alpha_t / alpha_s
  double sigma2_ts;  // sigma^2_{t|s} = sigma_t^2 - alpha_{t|s}^2 sigma_s^2
};

inline std::pair<double, double> alpha_sigma(TimePoint t) {
  // cos(pi/2) rounds to 6.1e-17, not 0; pin the endpoint so the
  // divergence guards on alpha_t = 0 actually fire at t = 1.
  if (t.value() == 1.0) return {0.0, 1.0};
  const double u = 0.5 * kPi * t.value();
  return {std::cos(u), std::sin(u)};
}

inline double snr(TimePoint t) {
  if (t.value() == 0.0) throw DivergenceError("snr: diverges at t=0 (sigma=0)");
  const auto [a, s] = alpha_sigma(t);
  return (a * a) / (s * s);
}

inline double snr_prime(TimePoint t) {
  if (t.value() == 0.0) throw DivergenceError("snr_prime: diverges at t=0 (sigma=0)");
  const auto [a, s] = alpha_sigma(t);
  return -kPi * a / (s * s * s);
}

inline ScheduleValues schedule_at(TimePoint t) {
  const auto [a, s] = alpha_sigma(t);
  return {a, s, snr(t), snr_prime(t)};
}

inline TransitionCoeffs transition_coeffs(TimePoint s, TimePoint t) {
  if (s.value() > t.value()) throw OrderingError("transition_coeffs: requires s <= t");
  const auto [as, ss] = alpha_sigma(s);
  const auto [at, st] = alpha_sigma(t);
  if (as == 0.0) throw DivergenceError("transition_coeffs: alpha_s = 0 (degenerate source)");
  const double alpha_ts = at / as;
  // Exact zero when s == t; roundoff can leave a tiny negative otherwise.
  double sigma2_ts = st * st - alpha_ts * alpha_ts * ss * ss;
  if (sigma2_ts < 0.0) sigma2_ts = 0.0;
  return {alpha_ts, sigma2_ts};
}

// w(t) relating the weighted loss to the NELBO, per space:
//   w_x = -1/SNR'   w_eps = -SNR/SNR'
//   w_v = -(alpha^2+sigma^2)/(sigma^2 SNR')   w_s = -alpha^2/(sigma^4 SNR')
// All strictly positive on the open interval (0,1).
inline double weight(TargetSpace space, TimePoint t) {
  if (t.value() <= 0.0 || t.value() >= 1.0)
    throw DivergenceError("weight: defined only for t in (0,1)");
  const auto [a, s] = alpha_sigma(t);
  const double s2 = s * s;
  const double neg_snr_prime = kPi * a / (s2 * s);
  switch (space) {
    case TargetSpace::X: return 1.0 / neg_snr_prime;
    case TargetSpace::Eps: return (a * a / s2) / neg_snr_prime;
    case TargetSpace::V: return (a * a + s2) / (s2 * neg_snr_prime);
    case TargetSpace::S: return (a * a) / (s2 * s2 * neg_snr_prime);
  }
  throw RangeError("weight: bad space");
}

// 1/w(t): the SNR scaling each NELBO formulation applies to its squared error.
inline double snr_scaling(TargetSpace space, TimePoint t) {
  return 1.0 / weight(space, t);
}

}  // namespace dll
