#pragma once

// Two-setting CHSH baseline used for comparison with the pyramid picture.

#include <cmath>
#include <numbers>
#include <string_view>

#include "pyramid/errors.hpp"
#include "pyramid/geometry.hpp"
#include "pyramid/montecarlo.hpp"

namespace pyramid::chsh {

inline constexpr double kLocalBound = 2.0;
inline constexpr double kTsirelsonBound = 2.0 * std::numbers::sqrt2;
inline constexpr double kAlgebraicBound = 4.0;

struct Correlators {
  double m00 = 0.0;
  double m01 = 0.0;
  double m10 = 0.0;
  double m11 = 0.0;
};

inline double value(const Correlators& c) {
  for (double m : {c.m00, c.m01, c.m10, c.m11}) {
    if (!(std::abs(m) <= 1.0)) throw DomainError("chsh: correlators must lie in [-1,1]");
  }
  return c.m00 + c.m01 + c.m10 - c.m11;
}

enum class Bucket { kSL, kQuantum, kNoSignalling, kInvalid };

inline std::string_view to_string(Bucket b) {
  switch (b) {
    case Bucket::kSL: return "SL";
    case Bucket::kQuantum: return "Q\\SL";
    case Bucket::kNoSignalling: return "NS\\Q";
    case Bucket::kInvalid: return "invalid";
  }
  return "?";
}

/// Buckets |S| against 2, 2 sqrt 2 and 4; bounds are closed.
inline Bucket classify(double s, double tol = kDefaultTolerance) {
  detail::require_tolerance(tol);
  const double a = std::abs(s);
  if (!std::isfinite(a) || a > kAlgebraicBound + tol) return Bucket::kInvalid;
  if (a <= kLocalBound + tol) return Bucket::kSL;
  if (a <= kTsirelsonBound + tol) return Bucket::kQuantum;
  return Bucket::kNoSignalling;
}

/// Fractions of the no-signalling range occupied by SL and Q.
struct OccupancyRatios {
  double chsh_sl = kLocalBound / kAlgebraicBound;
  double chsh_q = kTsirelsonBound / kAlgebraicBound;
  double pyramid_sl = reference::kSLFraction;
  double pyramid_q = reference::kQFraction;

  [[nodiscard]] double chsh_beyond_quantum() const { return 1.0 - chsh_q; }
  [[nodiscard]] double pyramid_beyond_quantum() const { return 1.0 - pyramid_q; }
};

inline OccupancyRatios occupancy_ratios() { return {}; }

}  // namespace pyramid::chsh
