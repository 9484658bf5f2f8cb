#pragma once

// Per-example loss integrands. Squared norms are summed over dimensions (not
// averaged); batch reporting divides by batch size only. Every form reduces
// to c(form, space, t) * ||target - pred||^2:
//
//               x              eps              v                    s
//   NELBO       -SNR'          -SNR'/SNR        -SNR' s^2/(a^2+s^2)  -SNR' s^4/a^2
//   weighted    1              1                1                    1
//   rescaled    1              s^2/a^2          s^2/(a^2+s^2)        s^4/a^2
//
// The NELBO rows are mutually equivalent on exact conversions; the rescaled
// rows equal the weighted x-loss.

#include <array>
#include <span>
#include <string>

#include "dll/schedule.hpp"
#include "dll/spaces.hpp"

namespace dll {

enum class LossForm { Nelbo, Weighted, Rescaled };

inline const char* to_string(LossForm f) {
  switch (f) {
    case LossForm::Nelbo: return "nelbo";
    case LossForm::Weighted: return "weighted";
    case LossForm::Rescaled: return "rescaled";
  }
  return "?";
}

inline LossForm form_from_string(const std::string& s) {
  if (s == "nelbo") return LossForm::Nelbo;
  if (s == "weighted") return LossForm::Weighted;
  if (s == "rescaled") return LossForm::Rescaled;
  throw RangeError("unknown loss form '" + s + "' (expected nelbo|weighted|rescaled)");
}

struct LossSample {
  double value;
  TargetSpace space;
  LossForm form;
  double t;
};

// c(form, space, t); requires t in (0,1).
inline double loss_coefficient(LossForm form, TargetSpace space, TimePoint t) {
  switch (form) {
    case LossForm::Nelbo: return 1.0 / weight(space, t);
    case LossForm::Weighted:
      if (t.value() <= 0.0 || t.value() >= 1.0)
        throw DivergenceError("loss_coefficient: t must lie in (0,1)");
      return 1.0;
    case LossForm::Rescaled: return weight(TargetSpace::X, t) / weight(space, t);
  }
  throw RangeError("loss_coefficient: bad form");
}

inline LossSample loss_integrand(LossForm form, TargetSpace space, std::span<const double> target,
                                 std::span<const double> pred, TimePoint t) {
  const double c = loss_coefficient(form, space, t);
  return {c * squared_distance(target, pred), space, form, t.value()};
}

// NELBO integrand computed in all four spaces from one data prediction x_hat,
// via the implied eps/v/s predictions. The four values agree up to roundoff.
inline std::array<double, 4> nelbo_equiv_check(std::span<const double> x,
                                               std::span<const double> x_hat,
                                               std::span<const double> eps, TimePoint t) {
  const size_t d = x.size();
  Vec z(d), tgt(d), pred(d);
  noisify(x, eps, t, z);

  std::array<double, 4> out{};
  // x-space: direct.
  out[0] = loss_integrand(LossForm::Nelbo, TargetSpace::X, x, x_hat, t).value;
  // eps-space.
  eps_from_x(z, x_hat, t, pred);
  out[1] = loss_integrand(LossForm::Nelbo, TargetSpace::Eps, eps, pred, t).value;
  // v-space: v_hat = alpha*eps_hat - sigma*x_hat.
  Vec eps_hat = pred;
  v_target(x, eps, t, tgt);
  v_target(x_hat, eps_hat, t, pred);
  out[2] = loss_integrand(LossForm::Nelbo, TargetSpace::V, tgt, pred, t).value;
  // s-space: s_hat = -eps_hat/sigma.
  const auto [a, s] = alpha_sigma(t);
  score_target(x, z, t, tgt);
  for (size_t i = 0; i < d; ++i) pred[i] = -eps_hat[i] / s;
  out[3] = loss_integrand(LossForm::Nelbo, TargetSpace::S, tgt, pred, t).value;
  return out;
}

// Discrete-T diffusion loss term, one (s,t) transition:
//   (1/2) (SNR(s) - SNR(t)) ||x - x_hat||^2
// The 1/2 is kept here; the continuous integrands above drop it.
inline double discrete_nelbo_term(std::span<const double> x, std::span<const double> x_hat,
                                  TimePoint s, TimePoint t) {
  if (!(s.value() < t.value())) throw OrderingError("discrete_nelbo_term: requires s < t");
  if (s.value() == 0.0) throw DivergenceError("discrete_nelbo_term: SNR(0) diverges");
  return 0.5 * (snr(s) - snr(t)) * squared_distance(x, x_hat);
}

}  // namespace dll
