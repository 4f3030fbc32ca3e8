#pragma once

// Conditional probability tables P(a1, a2 | q1, q2) for three settings and
// two outcomes per site, with moment extraction and the correlator expansion
//   P = 1/4 (1 + a1 A1 + a2 A2 + a1 a2 M).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "pyramid/errors.hpp"
#include "pyramid/geometry.hpp"

namespace pyramid {

inline constexpr int kSettings = 3;

/// Outcome pairs in canonical order: (+,+), (+,-), (-,+), (-,-).
inline constexpr std::array<std::array<int, 2>, 4> kOutcomePairs{{{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}}};

/// Index of (a1, a2) in kOutcomePairs; outcomes are +1 or -1.
constexpr std::size_t outcome_index(int a1, int a2) {
  return (a1 > 0 ? 0u : 2u) + (a2 > 0 ? 0u : 1u);
}

/// Same outcome pair with the sites swapped.
constexpr std::size_t swapped_outcome_index(std::size_t o) {
  constexpr std::array<std::size_t, 4> kSwap{0, 2, 1, 3};
  return kSwap[o];
}

using Block = std::array<double, 4>;
using SettingMatrix = std::array<std::array<double, 3>, 3>;

inline void require_setting(int q) {
  if (q < 0 || q >= kSettings) throw DomainError("setting label must be 0, 1 or 2, got " + std::to_string(q));
}

/// Dense 36-entry table. Holds any table, valid or not; use validate().
class Behavior {
 public:
  Behavior() = default;
  explicit Behavior(const std::array<std::array<Block, 3>, 3>& blocks) : blocks_(blocks) {}

  static Behavior uniform() {
    Behavior b;
    for (auto& row : b.blocks_)
      for (auto& blk : row) blk.fill(0.25);
    return b;
  }

  [[nodiscard]] const Block& block(int q1, int q2) const {
    require_setting(q1);
    require_setting(q2);
    return blocks_[static_cast<std::size_t>(q1)][static_cast<std::size_t>(q2)];
  }
  Block& block(int q1, int q2) {
    require_setting(q1);
    require_setting(q2);
    return blocks_[static_cast<std::size_t>(q1)][static_cast<std::size_t>(q2)];
  }

  [[nodiscard]] double prob(int a1, int a2, int q1, int q2) const { return block(q1, q2)[outcome_index(a1, a2)]; }

  /// Row-major over (q1, q2), then canonical outcome order.
  [[nodiscard]] std::array<double, 36> flat() const {
    std::array<double, 36> out{};
    std::size_t k = 0;
    for (const auto& row : blocks_)
      for (const auto& blk : row)
        for (double p : blk) out[k++] = p;
    return out;
  }

  friend bool operator==(const Behavior&, const Behavior&) = default;

 private:
  std::array<std::array<Block, 3>, 3> blocks_{};
};

struct ValidationReport {
  bool valid = true;
  double tolerance = kDefaultTolerance;
  /// sum(block) - 1 per setting pair.
  SettingMatrix normalization_residual{};
  double max_normalization_residual = 0.0;
  double most_negative_entry = 0.0;
  struct Issue {
    int q1, q2;
    std::string what;
  };
  std::vector<Issue> issues;
};

inline ValidationReport validate(const Behavior& b, double tol = kDefaultTolerance) {
  detail::require_tolerance(tol);
  ValidationReport r;
  r.tolerance = tol;
  for (int q1 = 0; q1 < kSettings; ++q1) {
    for (int q2 = 0; q2 < kSettings; ++q2) {
      const Block& blk = b.block(q1, q2);
      double sum = 0.0;
      for (std::size_t o = 0; o < 4; ++o) {
        const double p = blk[o];
        if (!std::isfinite(p)) {
          r.valid = false;
          r.issues.push_back({q1, q2, "non-finite entry"});
          continue;
        }
        sum += p;
        r.most_negative_entry = std::min(r.most_negative_entry, p);
        if (p < -tol) {
          r.valid = false;
          std::ostringstream os;
          os << "negative probability " << p << " at outcome (" << kOutcomePairs[o][0] << ","
             << kOutcomePairs[o][1] << ")";
          r.issues.push_back({q1, q2, os.str()});
        } else if (p > 1.0 + tol) {
          r.valid = false;
          r.issues.push_back({q1, q2, "probability above 1"});
        }
      }
      const double residual = sum - 1.0;
      r.normalization_residual[static_cast<std::size_t>(q1)][static_cast<std::size_t>(q2)] = residual;
      r.max_normalization_residual = std::max(r.max_normalization_residual, std::abs(residual));
      if (std::abs(residual) > tol) {
        r.valid = false;
        std::ostringstream os;
        os << "block sums to " << sum;
        r.issues.push_back({q1, q2, os.str()});
      }
    }
  }
  return r;
}

struct SymmetryReport {
  bool symmetric = true;
  double max_residual = 0.0;
};

/// P(a1,a2|q1,q2) == P(a2,a1|q2,q1) for every argument. On the diagonal this
/// is P(+,-|q,q) == P(-,+|q,q).
inline SymmetryReport check_exchange_symmetry(const Behavior& b, double tol = kDefaultTolerance) {
  detail::require_tolerance(tol);
  SymmetryReport r;
  for (int q1 = 0; q1 < kSettings; ++q1) {
    for (int q2 = q1; q2 < kSettings; ++q2) {
      for (std::size_t o = 0; o < 4; ++o) {
        const double d = std::abs(b.block(q1, q2)[o] - b.block(q2, q1)[swapped_outcome_index(o)]);
        r.max_residual = std::max(r.max_residual, d);
      }
    }
  }
  r.symmetric = r.max_residual <= tol;
  return r;
}

struct SignallingReport {
  bool no_signalling = true;
  double max_deviation = 0.0;
};

/// Site-1 marginals must not depend on q2, site-2 marginals not on q1.
inline SignallingReport check_no_signalling(const Behavior& b, double tol = kDefaultTolerance) {
  detail::require_tolerance(tol);
  SignallingReport r;
  for (int local = 0; local < kSettings; ++local) {
    for (int a : {+1, -1}) {
      double lo1 = 2.0, hi1 = -2.0, lo2 = 2.0, hi2 = -2.0;
      for (int remote = 0; remote < kSettings; ++remote) {
        const double m1 = b.prob(a, +1, local, remote) + b.prob(a, -1, local, remote);
        const double m2 = b.prob(+1, a, remote, local) + b.prob(-1, a, remote, local);
        lo1 = std::min(lo1, m1);
        hi1 = std::max(hi1, m1);
        lo2 = std::min(lo2, m2);
        hi2 = std::max(hi2, m2);
      }
      r.max_deviation = std::max({r.max_deviation, hi1 - lo1, hi2 - lo2});
    }
  }
  r.no_signalling = r.max_deviation <= tol;
  return r;
}

/// <a1 a2> at settings (q1, q2).
inline double mixed_moment(const Behavior& b, int q1, int q2) {
  const Block& blk = b.block(q1, q2);
  return (blk[0] + blk[3]) - (blk[1] + blk[2]);
}

inline SettingMatrix moment_matrix(const Behavior& b) {
  SettingMatrix m{};
  for (int q1 = 0; q1 < kSettings; ++q1)
    for (int q2 = 0; q2 < kSettings; ++q2)
      m[static_cast<std::size_t>(q1)][static_cast<std::size_t>(q2)] = mixed_moment(b, q1, q2);
  return m;
}

/// (M01, M02, M12). Throws PreconditionError naming the first setting pair
/// whose transpose disagrees by more than tol.
inline MomentPoint reduce_to_moment_point(const Behavior& b, double tol = kDefaultTolerance) {
  detail::require_tolerance(tol);
  constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};
  std::array<double, 3> out{};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto [q1, q2] = kPairs[k];
    const double m = mixed_moment(b, q1, q2);
    const double mt = mixed_moment(b, q2, q1);
    if (std::abs(m - mt) > tol) {
      std::ostringstream os;
      os << "reduce_to_moment_point: M" << q1 << q2 << " = " << m << " but M" << q2 << q1 << " = " << mt;
      throw PreconditionError(os.str());
    }
    out[k] = m;
  }
  return {out[0], out[1], out[2]};
}

/// A1[q1][q2] = <a1>, A2[q1][q2] = <a2>, M[q1][q2] = <a1 a2>, all per setting pair.
struct CorrelatorExpansion {
  SettingMatrix a1_marginals{};
  SettingMatrix a2_marginals{};
  SettingMatrix mixed{};
};

inline Behavior from_correlator_expansion(const CorrelatorExpansion& e, double tol = kDefaultTolerance) {
  detail::require_tolerance(tol);
  Behavior b;
  for (int q1 = 0; q1 < kSettings; ++q1) {
    for (int q2 = 0; q2 < kSettings; ++q2) {
      const auto i = static_cast<std::size_t>(q1), j = static_cast<std::size_t>(q2);
      const double a1m = e.a1_marginals[i][j], a2m = e.a2_marginals[i][j], mm = e.mixed[i][j];
      if (!std::isfinite(a1m) || !std::isfinite(a2m) || !std::isfinite(mm)) {
        throw DomainError("from_correlator_expansion: non-finite correlator");
      }
      Block& blk = b.block(q1, q2);
      for (std::size_t o = 0; o < 4; ++o) {
        const double s1 = kOutcomePairs[o][0], s2 = kOutcomePairs[o][1];
        const double p = 0.25 * (1.0 + s1 * a1m + s2 * a2m + s1 * s2 * mm);
        if (p < -tol) {
          std::ostringstream os;
          os << "from_correlator_expansion: block (" << q1 << "," << q2 << ") outcome (" << s1 << ","
             << s2 << ") has negative probability " << p;
          throw DomainError(os.str());
        }
        blk[o] = p;
      }
    }
  }
  return b;
}

inline CorrelatorExpansion to_correlator_expansion(const Behavior& b) {
  CorrelatorExpansion e;
  for (int q1 = 0; q1 < kSettings; ++q1) {
    for (int q2 = 0; q2 < kSettings; ++q2) {
      const auto i = static_cast<std::size_t>(q1), j = static_cast<std::size_t>(q2);
      const Block& p = b.block(q1, q2);
      e.a1_marginals[i][j] = (p[0] + p[1]) - (p[2] + p[3]);
      e.a2_marginals[i][j] = (p[0] + p[2]) - (p[1] + p[3]);
      e.mixed[i][j] = (p[0] + p[3]) - (p[1] + p[2]);
    }
  }
  return e;
}

/// Zero-marginal behavior 1/4 (1 + a1 a2 M) with off-diagonal moments taken
/// from the point and diagonal moments from diagonal_fill.
inline Behavior ns_behavior_from_point(const MomentPoint& p, const std::array<double, 3>& diagonal_fill = {0.0, 0.0, 0.0}) {
  if (p.max_abs() > 1.0) throw DomainError("ns_behavior_from_point: point outside [-1,1]^3");
  for (double f : diagonal_fill) {
    if (!(std::abs(f) <= 1.0)) throw DomainError("ns_behavior_from_point: diagonal fill outside [-1,1]");
  }
  CorrelatorExpansion e;
  e.mixed = {{{diagonal_fill[0], p.x(), p.y()}, {p.x(), diagonal_fill[1], p.z()}, {p.y(), p.z(), diagonal_fill[2]}}};
  return from_correlator_expansion(e, 0.0);
}

/// Linear constraints a symmetric behavior satisfies, one row per equation
/// over the flat() layout: nine normalisation rows (right-hand side 1), then
/// exchange-symmetry rows (right-hand side 0). Trivial rows are omitted.
struct ConstraintSystem {
  std::vector<std::array<double, 36>> rows;
  std::vector<double> rhs;
};

inline ConstraintSystem symmetric_behavior_constraints() {
  ConstraintSystem c;
  auto idx = [](int q1, int q2, std::size_t o) { return static_cast<std::size_t>(q1 * 3 + q2) * 4 + o; };
  for (int q1 = 0; q1 < kSettings; ++q1) {
    for (int q2 = 0; q2 < kSettings; ++q2) {
      std::array<double, 36> row{};
      for (std::size_t o = 0; o < 4; ++o) row[idx(q1, q2, o)] = 1.0;
      c.rows.push_back(row);
      c.rhs.push_back(1.0);
    }
  }
  for (int q1 = 0; q1 < kSettings; ++q1) {
    for (int q2 = q1; q2 < kSettings; ++q2) {
      for (std::size_t o = 0; o < 4; ++o) {
        const std::size_t lhs = idx(q1, q2, o), rhs = idx(q2, q1, swapped_outcome_index(o));
        if (lhs >= rhs) continue;
        std::array<double, 36> row{};
        row[lhs] = 1.0;
        row[rhs] = -1.0;
        c.rows.push_back(row);
        c.rhs.push_back(0.0);
      }
    }
  }
  return c;
}

/// Parameter counting for the (3,3,2,2) scenario and its symmetric reduction.
namespace dimensions {
inline constexpr int kConditionalProbabilities = 36;
inline constexpr int kAfterNormalisation = 36 - 9;
inline constexpr int kOffDiagonalSymmetric = 3 * 3;
inline constexpr int kDiagonalSymmetric = 3 * 2;
inline constexpr int kSymmetric = kOffDiagonalSymmetric + kDiagonalSymmetric;
inline constexpr int kMomentSpace = 3;

/// Facet count of the full local polytope; not recomputed here.
inline constexpr int kPositivityFacets = 36;
inline constexpr int kChshFacets = 72;
inline constexpr int kI3322Facets = 576;
inline constexpr int kLocalPolytopeFacets = kPositivityFacets + kChshFacets + kI3322Facets;
static_assert(kAfterNormalisation == 27 && kSymmetric == 15 && kLocalPolytopeFacets == 684);
}  // namespace dimensions

}  // namespace pyramid
