#pragma once

#include <array>
#include <string>

#include "dll/errors.hpp"

namespace dll {

// The quantity a denoiser predicts: data x, noise eps, velocity v, or score s.
// All four are interconvertible given the latent z_t and the time t.
enum class TargetSpace { X, Eps, V, S };

inline constexpr std::array<TargetSpace, 4> kAllSpaces = {
    TargetSpace::X, TargetSpace::Eps, TargetSpace::V, TargetSpace::S};

inline const char* to_string(TargetSpace s) {
  switch (s) {
    case TargetSpace::X: return "x";
    case TargetSpace::Eps: return "eps";
    case TargetSpace::V: return "v";
    case TargetSpace::S: return "s";
  }
  return "?";
}

inline TargetSpace space_from_string(const std::string& s) {
  if (s == "x") return TargetSpace::X;
  if (s == "eps") return TargetSpace::Eps;
  if (s == "v") return TargetSpace::V;
  if (s == "s") return TargetSpace::S;
  throw RangeError("unknown target space '" + s + "' (expected x|eps|v|s)");
}

}  // namespace dll
