#pragma once

// Closed-form region tests in the reduced mixed-moment space (X, Y, Z):
// the strongly-local tetrahedron, the quantum elliptope, and the
// no-signalling cube.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include "pyramid/errors.hpp"

namespace pyramid {

inline constexpr double kDefaultTolerance = 1e-9;

/// A point (X, Y, Z) = (M01, M02, M12) of off-diagonal mixed moments.
/// Construction rejects NaN and infinities.
class MomentPoint {
 public:
  constexpr MomentPoint() = default;
  MomentPoint(double x, double y, double z) : x_(x), y_(y), z_(z) {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw DomainError("MomentPoint: coordinates must be finite");
    }
  }

  [[nodiscard]] constexpr double x() const noexcept { return x_; }
  [[nodiscard]] constexpr double y() const noexcept { return y_; }
  [[nodiscard]] constexpr double z() const noexcept { return z_; }
  [[nodiscard]] constexpr std::array<double, 3> coords() const noexcept { return {x_, y_, z_}; }

  [[nodiscard]] double max_abs() const noexcept {
    return std::max({std::abs(x_), std::abs(y_), std::abs(z_)});
  }

  friend constexpr bool operator==(const MomentPoint&, const MomentPoint&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

inline double distance(const MomentPoint& a, const MomentPoint& b) {
  return std::hypot(a.x() - b.x(), a.y() - b.y(), a.z() - b.z());
}

/// Weights xi_1..xi_4 over the tetrahedron vertices. Components are stored as
/// given; point_of() checks normalisation.
struct BarycentricCoords {
  std::array<double, 4> xi{};

  [[nodiscard]] double sum() const noexcept { return xi[0] + xi[1] + xi[2] + xi[3]; }
  [[nodiscard]] double min() const noexcept { return *std::min_element(xi.begin(), xi.end()); }
  [[nodiscard]] double operator[](std::size_t i) const { return xi.at(i); }
};

/// Deterministic-model vertices of the strongly-local tetrahedron.
struct Tetrahedron {
  static constexpr std::array<std::array<double, 3>, 4> kVertices{{
      {1.0, 1.0, 1.0},
      {-1.0, -1.0, 1.0},
      {-1.0, 1.0, -1.0},
      {1.0, -1.0, -1.0},
  }};

  /// Vertex V_{index+1}, zero-based.
  static MomentPoint vertex(std::size_t index) {
    const auto& v = kVertices.at(index);
    return {v[0], v[1], v[2]};
  }

  /// |det(V2-V1, V3-V1, V4-V1)| / 6.
  static double volume() {
    const auto& v = kVertices;
    std::array<std::array<double, 3>, 3> e{};
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t c = 0; c < 3; ++c) e[k][c] = v[k + 1][c] - v[0][c];
    }
    const double det = e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
                       e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
                       e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
    return std::abs(det) / 6.0;
  }

  static constexpr double kCubeVolume = 8.0;
};

/// Correlation matrix of three unit vectors with off-diagonals (x, y, z).
class GramMatrix {
 public:
  explicit GramMatrix(const MomentPoint& p) : p_(p) {}

  [[nodiscard]] std::array<std::array<double, 3>, 3> entries() const {
    return {{{1.0, p_.x(), p_.y()}, {p_.x(), 1.0, p_.z()}, {p_.y(), p_.z(), 1.0}}};
  }

  /// 1 + 2xyz - x^2 - y^2 - z^2
  [[nodiscard]] double determinant() const {
    const double x = p_.x(), y = p_.y(), z = p_.z();
    return 1.0 + 2.0 * x * y * z - x * x - y * y - z * z;
  }

  /// The three 2x2 principal minors 1 - x^2, 1 - y^2, 1 - z^2.
  [[nodiscard]] std::array<double, 3> principal_minors() const {
    return {1.0 - p_.x() * p_.x(), 1.0 - p_.y() * p_.y(), 1.0 - p_.z() * p_.z()};
  }

  /// Gradient of the determinant with respect to (x, y, z).
  [[nodiscard]] std::array<double, 3> determinant_gradient() const {
    const double x = p_.x(), y = p_.y(), z = p_.z();
    return {2.0 * y * z - 2.0 * x, 2.0 * x * z - 2.0 * y, 2.0 * x * y - 2.0 * z};
  }

 private:
  MomentPoint p_;
};

enum class Membership { kInside, kBoundary, kOutside };

inline std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::kInside: return "inside";
    case Membership::kBoundary: return "boundary";
    case Membership::kOutside: return "outside";
  }
  return "?";
}

/// Closed-set test: inside or on the boundary.
inline bool in_closed(Membership m) { return m != Membership::kOutside; }

struct RegionMembership {
  Membership in_sl = Membership::kOutside;
  Membership in_q = Membership::kOutside;
  Membership in_ns = Membership::kOutside;
  BarycentricCoords barycentric;
  double gram_det = 0.0;
  double tolerance_used = kDefaultTolerance;
};

namespace detail {

inline void require_tolerance(double tol) {
  if (!(tol >= 0.0) || !std::isfinite(tol)) throw DomainError("tolerance must be finite and >= 0");
}

}  // namespace detail

inline BarycentricCoords barycentric_of(const MomentPoint& p) {
  const double x = p.x(), y = p.y(), z = p.z();
  return {{0.25 * (1.0 + x + y + z), 0.25 * (1.0 - x - y + z), 0.25 * (1.0 - x + y - z),
           0.25 * (1.0 + x - y - z)}};
}

inline MomentPoint point_of(const BarycentricCoords& c, double tol = kDefaultTolerance) {
  detail::require_tolerance(tol);
  for (double w : c.xi) {
    if (!std::isfinite(w)) throw DomainError("point_of: barycentric weights must be finite");
  }
  if (std::abs(c.sum() - 1.0) > tol) {
    std::ostringstream os;
    os << "point_of: barycentric weights sum to " << c.sum() << ", expected 1";
    throw DomainError(os.str());
  }
  const auto& w = c.xi;
  return {w[0] - w[1] - w[2] + w[3], w[0] - w[1] + w[2] - w[3], w[0] + w[1] - w[2] - w[3]};
}

/// Signed facet margins (xi_1..xi_4), positive inside. Facet i is the face
/// opposite vertex V_i. Given the normalisation sum = 1, any three of them
/// fix the fourth, which is why three inequalities describe the region.
inline std::array<double, 4> tetrahedron_facet_margins(const MomentPoint& p) {
  return barycentric_of(p).xi;
}

/// The three squared pyramid inequalities, evaluated as left minus right:
///   (1+Z)^2 - (X+Y)^2,  (1-X)^2 - (Y-Z)^2,  (1-Z)^2 - (X-Y)^2.
/// They factor as 16 xi1 xi2, 16 xi2 xi3 and 16 xi3 xi4 respectively.
inline std::array<double, 3> pyramid_inequalities(const MomentPoint& p) {
  const double x = p.x(), y = p.y(), z = p.z();
  auto sq = [](double v) { return v * v; };
  return {sq(1.0 + z) - sq(x + y), sq(1.0 - x) - sq(y - z), sq(1.0 - z) - sq(x - y)};
}

/// Tolerance applies to the linear facet functionals 4 xi_i (the un-squared
/// pyramid inequalities), so the barycentric threshold is tol / 4.
inline std::pair<Membership, BarycentricCoords> sl_membership(const MomentPoint& p,
                                                              double tol = kDefaultTolerance) {
  detail::require_tolerance(tol);
  const BarycentricCoords bc = barycentric_of(p);
  const double margin = bc.min();
  const double band = 0.25 * tol;
  Membership m = Membership::kOutside;
  if (margin > band) {
    m = Membership::kInside;
  } else if (margin >= -band) {
    m = Membership::kBoundary;
  }
  return {m, bc};
}

inline std::pair<Membership, double> q_membership(const MomentPoint& p, double tol = kDefaultTolerance) {
  detail::require_tolerance(tol);
  const double det = GramMatrix(p).determinant();
  const double extent = p.max_abs();
  Membership m = Membership::kBoundary;
  if (det < -tol || extent > 1.0 + tol) {
    m = Membership::kOutside;
  } else if (det > tol && extent < 1.0 - tol) {
    m = Membership::kInside;
  }
  return {m, det};
}

inline Membership ns_membership(const MomentPoint& p, double tol = kDefaultTolerance) {
  detail::require_tolerance(tol);
  const double extent = p.max_abs();
  if (extent < 1.0 - tol) return Membership::kInside;
  if (extent <= 1.0 + tol) return Membership::kBoundary;
  return Membership::kOutside;
}

/// Runs all three tests and enforces SL within Q within NS.
inline RegionMembership classify(const MomentPoint& p, double tol = kDefaultTolerance) {
  RegionMembership r;
  std::tie(r.in_sl, r.barycentric) = sl_membership(p, tol);
  std::tie(r.in_q, r.gram_det) = q_membership(p, tol);
  r.in_ns = ns_membership(p, tol);
  r.tolerance_used = tol;
  if (r.in_sl == Membership::kInside && r.in_q == Membership::kOutside) {
    throw ConsistencyError("classify: point strictly inside SL but outside Q");
  }
  if (r.in_q == Membership::kInside && r.in_ns == Membership::kOutside) {
    throw ConsistencyError("classify: point strictly inside Q but outside NS");
  }
  return r;
}

/// Innermost closed region of the hierarchy containing the point.
enum class Region { kStronglyLocal, kQuantum, kNoSignalling, kOutside };

inline std::string_view to_string(Region r) {
  switch (r) {
    case Region::kStronglyLocal: return "SL";
    case Region::kQuantum: return "Q\\SL";
    case Region::kNoSignalling: return "NS\\Q";
    case Region::kOutside: return "outside-NS";
  }
  return "?";
}

inline Region innermost_region(const RegionMembership& r) {
  if (in_closed(r.in_sl)) return Region::kStronglyLocal;
  if (in_closed(r.in_q)) return Region::kQuantum;
  if (in_closed(r.in_ns)) return Region::kNoSignalling;
  return Region::kOutside;
}

/// Closed interval of Z keeping (x, y, Z) in the tetrahedron:
/// |x+y| - 1 <= Z <= 1 - |x-y|. Empty when the (x, y) column misses it.
inline std::optional<std::pair<double, double>> sl_z_range(double x, double y) {
  const double lo = std::abs(x + y) - 1.0;
  const double hi = 1.0 - std::abs(x - y);
  if (lo > hi) return std::nullopt;
  return std::pair{lo, hi};
}

}  // namespace pyramid
