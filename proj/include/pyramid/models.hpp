#pragma once

// Model families: local hidden-variable models with site-identical
// responses, the photon-pair quantum family, and their moment points.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <vector>

#include "pyramid/behavior.hpp"
#include "pyramid/errors.hpp"
#include "pyramid/geometry.hpp"

namespace pyramid {

/// Single-site expectation values <a> at settings 0, 1, 2 (alpha, beta, gamma).
/// Each site answers with p(a | q) = (1 + a <a>_q) / 2.
struct SiteMeans {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  [[nodiscard]] double at(int q) const {
    require_setting(q);
    return q == 0 ? alpha : (q == 1 ? beta : gamma);
  }
  [[nodiscard]] bool in_range() const {
    return std::abs(alpha) <= 1.0 && std::abs(beta) <= 1.0 && std::abs(gamma) <= 1.0;
  }
  friend constexpr bool operator==(const SiteMeans&, const SiteMeans&) = default;
};

/// Fixed outcome +-1 per setting.
class DeterministicStrategy {
 public:
  DeterministicStrategy(int alpha, int beta, int gamma) : signs_{alpha, beta, gamma} {
    for (int s : signs_) {
      if (s != 1 && s != -1) throw DomainError("DeterministicStrategy: outcomes must be +1 or -1");
    }
  }
  [[nodiscard]] int alpha() const noexcept { return signs_[0]; }
  [[nodiscard]] int beta() const noexcept { return signs_[1]; }
  [[nodiscard]] int gamma() const noexcept { return signs_[2]; }
  [[nodiscard]] SiteMeans means() const {
    return {static_cast<double>(signs_[0]), static_cast<double>(signs_[1]), static_cast<double>(signs_[2])};
  }
  friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;

 private:
  std::array<int, 3> signs_;
};

/// (alpha beta, alpha gamma, beta gamma).
inline MomentPoint moments_of_strategy(const SiteMeans& s) {
  if (!s.in_range()) throw DomainError("moments_of_strategy: single-site means must lie in [-1,1]");
  return {s.alpha * s.beta, s.alpha * s.gamma, s.beta * s.gamma};
}

/// Canonical strategy for vertex V_index (1-based) with alpha fixed to +1.
inline DeterministicStrategy vertex_strategy(int index) {
  if (index < 1 || index > 4) throw DomainError("vertex_strategy: index must be 1..4");
  const auto& v = Tetrahedron::kVertices[static_cast<std::size_t>(index - 1)];
  // alpha = +1 gives beta = X, gamma = Y.
  return {1, static_cast<int>(v[0]), static_cast<int>(v[1])};
}

/// Discrete hidden variable with weights f(lambda) and site-identical responses.
class LocalHiddenVariableModel {
 public:
  /// Rejects weights that are negative or do not sum to 1 within tol, and
  /// responses outside [-1,1]. Weights are rescaled to sum exactly to 1.
  LocalHiddenVariableModel(std::vector<double> weights, std::vector<SiteMeans> responses,
                           double tol = kDefaultTolerance)
      : weights_(std::move(weights)), responses_(std::move(responses)) {
    detail::require_tolerance(tol);
    if (weights_.empty()) throw DomainError("LocalHiddenVariableModel: needs at least one hidden-variable value");
    if (weights_.size() != responses_.size()) {
      throw DomainError("LocalHiddenVariableModel: weights and responses differ in length");
    }
    double sum = 0.0;
    for (double w : weights_) {
      if (!std::isfinite(w) || w < 0.0) throw DomainError("LocalHiddenVariableModel: weights must be finite and >= 0");
      sum += w;
    }
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream os;
      os << "LocalHiddenVariableModel: weights sum to " << sum << ", expected 1";
      throw DomainError(os.str());
    }
    for (double& w : weights_) w /= sum;
    for (const auto& r : responses_) {
      if (!r.in_range()) throw DomainError("LocalHiddenVariableModel: responses must lie in [-1,1]");
    }
  }

  static LocalHiddenVariableModel single(const SiteMeans& s) { return {{1.0}, {s}}; }

  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  [[nodiscard]] const std::vector<SiteMeans>& responses() const noexcept { return responses_; }

 private:
  std::vector<double> weights_;
  std::vector<SiteMeans> responses_;
};

inline MomentPoint moments_of_lhv(const LocalHiddenVariableModel& m) {
  double x = 0.0, y = 0.0, z = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double f = m.weights()[k];
    const SiteMeans& r = m.responses()[k];
    x += f * r.alpha * r.beta;
    y += f * r.alpha * r.gamma;
    z += f * r.beta * r.gamma;
  }
  return {x, y, z};
}

/// P(a1,a2|q1,q2) = sum_lambda f(lambda) p(a1|q1,lambda) p(a2|q2,lambda).
inline Behavior behavior_of_lhv(const LocalHiddenVariableModel& m) {
  Behavior b;
  for (int q1 = 0; q1 < kSettings; ++q1) {
    for (int q2 = 0; q2 < kSettings; ++q2) {
      Block& blk = b.block(q1, q2);
      for (std::size_t o = 0; o < 4; ++o) {
        const int a1 = kOutcomePairs[o][0], a2 = kOutcomePairs[o][1];
        double p = 0.0;
        for (std::size_t k = 0; k < m.size(); ++k) {
          const SiteMeans& r = m.responses()[k];
          p += m.weights()[k] * 0.5 * (1.0 + a1 * r.at(q1)) * 0.5 * (1.0 + a2 * r.at(q2));
        }
        blk[o] = p;
      }
    }
  }
  return b;
}

/// Weight below which realize_sl_point drops a hidden-variable value.
inline constexpr double kRealizationWeightFloor = 1e-12;

/// Mixture of at most four vertex strategies reproducing p, with weights equal
/// to the barycentric coordinates. Vertices use 1 value, edges 2, faces 3.
inline LocalHiddenVariableModel realize_sl_point(const MomentPoint& p, double tol = kDefaultTolerance) {
  const auto [membership, bc] = sl_membership(p, tol);
  if (membership == Membership::kOutside) {
    std::ostringstream os;
    os << "realize_sl_point: point outside the closed tetrahedron; facet margins (" << bc.xi[0] << ", "
       << bc.xi[1] << ", " << bc.xi[2] << ", " << bc.xi[3] << ")";
    throw DomainError(os.str());
  }
  std::vector<double> weights;
  std::vector<SiteMeans> responses;
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (bc.xi[i] < kRealizationWeightFloor) continue;
    weights.push_back(bc.xi[i]);
    responses.push_back(vertex_strategy(static_cast<int>(i) + 1).means());
    total += bc.xi[i];
  }
  for (double& w : weights) w /= total;
  return {std::move(weights), std::move(responses)};
}

/// Polariser angles (radians) for a maximally entangled photon pair.
struct PhotonPairModel {
  double theta0 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;

  [[nodiscard]] double angle(int q) const {
    require_setting(q);
    return q == 0 ? theta0 : (q == 1 ? theta1 : theta2);
  }
};

/// <a1 a2> = cos(2 (theta_q1 - theta_q2)); equal settings give +1.
inline double photon_correlator(const PhotonPairModel& m, int q1, int q2) {
  if (q1 == q2) return 1.0;
  return std::cos(2.0 * (m.angle(q1) - m.angle(q2)));
}

inline MomentPoint photon_moments(const PhotonPairModel& m) {
  if (!std::isfinite(m.theta0) || !std::isfinite(m.theta1) || !std::isfinite(m.theta2)) {
    throw DomainError("photon_moments: angles must be finite");
  }
  return {photon_correlator(m, 0, 1), photon_correlator(m, 0, 2), photon_correlator(m, 1, 2)};
}

/// Zero marginals, cosine correlators, perfect diagonal correlation.
inline Behavior photon_behavior(const PhotonPairModel& m) {
  (void)photon_moments(m);
  CorrelatorExpansion e;
  for (int q1 = 0; q1 < kSettings; ++q1)
    for (int q2 = 0; q2 < kSettings; ++q2)
      e.mixed[static_cast<std::size_t>(q1)][static_cast<std::size_t>(q2)] = photon_correlator(m, q1, q2);
  return from_correlator_expansion(e, 0.0);
}

/// Solve (alpha beta, alpha gamma, beta gamma) = p with |alpha|,|beta|,|gamma| <= 1
/// (within tol). Returns a witness with alpha >= 0, or nothing if p is not a
/// single-hidden-variable point. Coordinates within tol of zero are treated
/// as zero; the quotient formulas are only used when none is.
inline std::optional<SiteMeans> factorize_n1(const MomentPoint& p, double tol = kDefaultTolerance) {
  detail::require_tolerance(tol);
  const double x = p.x(), y = p.y(), z = p.z();
  const bool zx = std::abs(x) <= tol, zy = std::abs(y) <= tol, zz = std::abs(z) <= tol;
  const int zeros = int(zx) + int(zy) + int(zz);
  if (p.max_abs() > 1.0 + tol) return std::nullopt;
  switch (zeros) {
    case 3:
      return SiteMeans{1.0, 0.0, 0.0};
    case 2:
      // The one nonzero product is carried by a unit mean times the coordinate.
      if (!zx) return SiteMeans{1.0, x, 0.0};
      if (!zy) return SiteMeans{1.0, 0.0, y};
      return SiteMeans{0.0, 1.0, z};
    case 1:
      // One vanishing product forces a zero mean, which kills a second product.
      return std::nullopt;
    default:
      break;
  }
  if (x * y * z <= 0.0) return std::nullopt;
  const double a2 = x * y / z, b2 = x * z / y, c2 = y * z / x;
  const double lim = (1.0 + tol) * (1.0 + tol);
  if (a2 > lim || b2 > lim || c2 > lim) return std::nullopt;
  const double alpha = std::sqrt(a2);
  return SiteMeans{std::min(alpha, 1.0), std::clamp(x / alpha, -1.0, 1.0), std::clamp(y / alpha, -1.0, 1.0)};
}

/// True when p = moments_of_strategy(s) for some s with at least one of
/// |alpha|, |beta|, |gamma| equal to 1: the curved boundary of the
/// single-hidden-variable region.
inline bool is_on_curved_n1_surface(const MomentPoint& p, double tol = kDefaultTolerance) {
  const auto s = factorize_n1(p, tol);
  if (!s) return false;
  const double x = p.x(), y = p.y(), z = p.z();
  const bool zx = std::abs(x) <= tol, zy = std::abs(y) <= tol, zz = std::abs(z) <= tol;
  if (int(zx) + int(zy) + int(zz) >= 2) return true;
  const double largest = std::max({x * y / z, x * z / y, y * z / x});
  return largest >= (1.0 - tol) * (1.0 - tol);
}

}  // namespace pyramid
